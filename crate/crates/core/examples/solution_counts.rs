// Counts isolated complex solutions with homotopy continuation, and shows
// why intra-camera triples need the ray-bundle equations.

use sixpt::equations::{build_equations, SixPointProblem};
use sixpt::minimal::{system_for, SolverKind};
use sixpt::solver::{complex_roots, Backend, SolveError, SolverConfig};
use sixpt::synth::{make_instance, minimal_scene, Scenario};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SolverConfig {
        backend: Backend::Homotopy,
        ..Default::default()
    };
    for kind in SolverKind::ALL {
        let inst = make_instance(&minimal_scene(Scenario::GeneralizedCamera, kind, 3));
        let problem = SixPointProblem::new(inst.rig, inst.pcs)?;
        let sys = system_for(kind, &problem)?;
        let roots = complex_roots(&sys, &cfg)?;
        println!("{kind:>8}: {} isolated complex roots (expected {})", roots.count, kind.solution_count());
    }

    let inst = make_instance(&minimal_scene(Scenario::GeneralizedCamera, SolverKind::Intra48, 3));
    let sys = build_equations(&SixPointProblem::new(inst.rig, inst.pcs)?)?.without_ray_bundle();
    match complex_roots(&sys, &cfg) {
        Err(SolveError::MissingRayBundleConstraints) => {
            println!("intra triples without ray-bundle equations: rejected, the roots form curves")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
