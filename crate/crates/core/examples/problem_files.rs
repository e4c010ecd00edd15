// Writes a synthetic problem to JSON, reads it back and solves it, as the
// `sixpt synth` and `sixpt solve` commands do.

use sixpt::io::{to_json, ProblemFile, SolveReport};
use sixpt::minimal::{auto_kind, solve_detailed, SolverKind};
use sixpt::solver::SolverConfig;
use sixpt::synth::{best_errors, make_instance, minimal_scene, Scenario};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let inst = make_instance(&minimal_scene(Scenario::TwoCameraRig, SolverKind::Inter56, 21));
    let dir = std::env::temp_dir().join(format!("sixpt-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("problem.json");
    ProblemFile::from_instance(&inst).save(&path)?;

    let file = ProblemFile::load(&path)?;
    let (rig, pcs) = (file.rig()?, file.correspondences()?);
    let truth = file.ground_truth()?.ok_or("missing ground truth")?;
    let sol = solve_detailed(&pcs, &rig, auto_kind(&pcs)?, &SolverConfig::default())?;
    let report = SolveReport::from(&sol);
    println!("{} solver, {} candidate poses", report.solver, report.poses.len());
    if let Some((er, et, _)) = best_errors(&truth, &sol.poses) {
        println!("closest candidate: eps_R {er:.1e} deg, eps_t {et:.1e}");
    }
    let json = to_json(&report)?;
    println!("report is {} bytes of JSON", json.len());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
