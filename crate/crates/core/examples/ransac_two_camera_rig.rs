// Robust estimation on a noisy two-camera rig scene with gross outliers.

use sixpt::geometry::{rotation_error, translation_dir_error};
use sixpt::minimal::SolverKind;
use sixpt::ransac::{run_ransac, RansacConfig};
use sixpt::synth::{make_instance, SceneConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scene = SceneConfig {
        noise_px: 0.5,
        outlier_ratio: 0.3,
        seed: 5,
        ..Default::default()
    };
    let inst = make_instance(&scene);
    let cfg = RansacConfig {
        seed: 1,
        ..Default::default()
    };
    let result = run_ransac(&inst.pcs, &inst.rig, SolverKind::Intra48, &cfg)?;

    let recovered = result
        .inliers
        .iter()
        .zip(&inst.inliers)
        .filter(|(found, truth)| **found && **truth)
        .count();
    let true_inliers = inst.inliers.iter().filter(|v| **v).count();
    println!(
        "{} iterations, {} inliers ({recovered} of {true_inliers} true inliers), estimated outlier ratio {:.2}",
        result.iterations, result.inlier_count, result.outlier_ratio
    );
    println!(
        "rotation error {:.3} deg, translation direction error {:.3} deg",
        rotation_error(&inst.pose.rotation, &result.pose.rotation),
        translation_dir_error(&inst.pose.translation, &result.pose.translation)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
