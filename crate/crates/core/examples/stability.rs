// Noise-free stability: distribution of log10 rotation errors per solver.

use sixpt::minimal::SolverKind;
use sixpt::solver::SolverConfig;
use sixpt::synth::{run_stability_experiment, success_rate, Scenario};

const TRIALS: usize = 100;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for kind in [SolverKind::Inter56, SolverKind::Inter48, SolverKind::Intra48] {
        let trials = run_stability_experiment(kind, Scenario::TwoCameraRig, TRIALS, 42, &SolverConfig::default());
        let mut bins = [0usize; 8];
        for t in trials.iter().filter(|t| t.solved) {
            let b = (-t.log10()[0]).floor().clamp(0.0, 14.0) as usize / 2;
            bins[b.min(7)] += 1;
        }
        let hist: Vec<String> = bins
            .iter()
            .enumerate()
            .map(|(k, n)| format!("1e-{}:{n}", 2 * k))
            .collect();
        println!(
            "{kind:>8}: p(eps < 1e-3) = {:.2}, log10 eps_R bins [{}]",
            success_rate(&trials, 1e-3, 1e-3),
            hist.join(" ")
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
