// Builds the rotation equations for an intra-camera configuration and
// checks them at the true rotation.

use nalgebra::Vector4;
use sixpt::equations::{build_equations, SixPointProblem};
use sixpt::geometry::rotation_to_cayley;
use sixpt::minimal::SolverKind;
use sixpt::synth::{make_instance, minimal_scene, Scenario};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let inst = make_instance(&minimal_scene(Scenario::TwoCameraRig, SolverKind::Intra48, 7));
    let problem = SixPointProblem::new(inst.rig.clone(), inst.pcs.clone())?;
    let sys = build_equations(&problem)?;

    for g in &sys.groups {
        println!("ray bundle: rows {:?}, cameras ({}, {})", g.rows, g.cam, g.cam_prime);
    }
    let max_degree = |ps: &[sixpt::poly::TriPoly]| ps.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    println!("minor equations: {} (degree <= {})", sys.e1.len(), max_degree(&sys.e1));
    println!("ray-bundle equations: {} (degree <= {})", sys.e2.len(), max_degree(&sys.e2));

    let q = rotation_to_cayley(&inst.pose.rotation)?.as_array();
    let worst = sys
        .polynomials()
        .map(|p| p.eval(&q).abs() / p.max_abs_coeff())
        .fold(0.0, f64::max);
    println!("largest relative residual at the true rotation: {worst:.2e}");

    // The translation spans the null space of M at the true rotation.
    let m = sys.m.eval(&q);
    let t = inst.pose.translation;
    let v = Vector4::new(t.x, t.y, t.z, 1.0);
    println!("|M(q) (t, 1)| / |M(q)| = {:.2e}", (&m * v).norm() / m.norm());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
