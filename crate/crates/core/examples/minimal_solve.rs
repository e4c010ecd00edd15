// Runs each six-point solver on a noise-free generalized-camera instance and
// compares the closest candidate with the true pose.

use sixpt::minimal::{auto_kind, solve_detailed, SolverKind};
use sixpt::solver::SolverConfig;
use sixpt::synth::{best_errors, make_instance, minimal_scene, Scenario};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SolverConfig::default();
    for kind in SolverKind::ALL {
        let inst = make_instance(&minimal_scene(Scenario::GeneralizedCamera, kind, 11));
        let picked = auto_kind(&inst.pcs)?;
        let sol = solve_detailed(&inst.pcs, &inst.rig, kind, &cfg)?;
        let (er, et, _) = best_errors(&inst.pose, &sol.poses).ok_or("no real solution")?;
        println!(
            "{kind:>8} ({}, auto picks {picked}): {} real of {} complex roots, best eps_R {er:.1e} deg, eps_t {et:.1e}",
            sol.match_type,
            sol.poses.len(),
            sol.complex_count
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
