//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits with
//! a failure status if any criterion fails.

use std::time::Instant;

use nalgebra::Matrix3;
use sixpt::enumerate::{classify_match_type, count_by_cameras, enumerate_configs, MatchType};
use sixpt::equations::{build_equations, build_m, cayley_divisor, SixPointProblem};
use sixpt::geometry::{rotation_error, rotation_to_cayley, translation_dir_error};
use sixpt::ransac::{ransac_iterations, ransac_iterations_stable, run_ransac, RansacConfig};
use sixpt::solver::{complex_roots, Backend, SolverConfig};
use sixpt::synth::{make_instance, minimal_scene, run_stability_experiment, success_rate, Scenario, SceneConfig};
use sixpt::SolverKind;

struct Outcome {
    pass: bool,
    detail: String,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn equation_shape() -> Outcome {
    let div = cayley_divisor();
    let mut bad = 0;
    let mut worst_rem: f64 = 0.0;
    for seed in 0..500 {
        let inst = make_instance(&minimal_scene(Scenario::GeneralizedCamera, SolverKind::Generic64, seed));
        let problem = SixPointProblem::new(inst.rig, inst.pcs).unwrap();
        let sys = build_equations(&problem).unwrap();
        if sys.e1.len() != 15 || sys.e1.iter().any(|p| p.degree().unwrap_or(0) > 6) {
            bad += 1;
        }
        let m = build_m(&problem).unwrap();
        for a in 0..6 {
            for b in a + 1..6 {
                let rows: Vec<usize> = (0..6).filter(|&r| r != a && r != b).collect();
                let det = m.submatrix(&rows, &[0, 1, 2, 3]).det().unwrap();
                if det.is_zero() {
                    continue;
                }
                let (_, rem) = det.divide(&div).unwrap();
                worst_rem = worst_rem.max(rem.max_abs_coeff() / det.max_abs_coeff());
            }
        }
    }
    Outcome {
        pass: bad == 0 && worst_rem < 1e-9,
        detail: format!("500 instances, {bad} with |E1| != 15 or degree > 6, worst relative remainder {worst_rem:.1e}"),
    }
}

fn ray_bundle_rank() -> Outcome {
    let (mut blocks, mut bad) = (0, 0);
    let (mut worst3, mut worst2) = (0f64, f64::INFINITY);
    for seed in 0..500 {
        let kind = if seed % 2 == 0 { SolverKind::Intra48 } else { SolverKind::Inter56 };
        let inst = make_instance(&minimal_scene(Scenario::GeneralizedCamera, kind, seed));
        let sys = build_equations(&SixPointProblem::new(inst.rig, inst.pcs).unwrap()).unwrap();
        let q = rotation_to_cayley(&inst.pose.rotation).unwrap().as_array();
        let m = sys.m.eval(&q);
        for g in &sys.groups {
            let n = Matrix3::from_fn(|i, j| m[(g.rows[i], j)]);
            let mut sv: Vec<f64> = n.singular_values().iter().copied().collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            let (r3, r2) = (sv[2] / sv[0], sv[1] / sv[0]);
            worst3 = worst3.max(r3);
            worst2 = worst2.min(r2);
            blocks += 1;
            if !(r3 < 1e-8 && r2 > 1e-4) {
                bad += 1;
            }
        }
    }
    Outcome {
        pass: bad == 0 && blocks >= 1000,
        detail: format!("{blocks} blocks, {bad} failing; max s3/s1 {worst3:.1e}, min s2/s1 {worst2:.1e}"),
    }
}

fn containment() -> Outcome {
    let cfg = SolverConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (kind, required, published) in [
        (SolverKind::Generic64, 0.99, None),
        (SolverKind::Inter56, 0.99, Some(0.99)),
        (SolverKind::Inter48, 0.80, Some(0.90)),
        (SolverKind::Intra48, 0.80, Some(0.81)),
    ] {
        let trials = run_stability_experiment(kind, Scenario::GeneralizedCamera, 1000, 2024, &cfg);
        let p = success_rate(&trials, 1e-6, 1e-6);
        let p2 = success_rate(&trials, 1e-3, 1e-3);
        pass &= p >= required;
        let reference = published.map_or(String::new(), |v| format!(", published p2 {v:.2}"));
        parts.push(format!("{kind} {p:.3} (need {required:.2}; p2 at 1e-3 {p2:.3}{reference})"));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn solution_counts() -> Outcome {
    let cfg = SolverConfig {
        backend: Backend::Homotopy,
        ..Default::default()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, kind, drop_bundles, expected) in [
        ("generic", SolverKind::Generic64, false, 64),
        ("inter E1", SolverKind::Inter56, true, 56),
        ("inter E1+E2", SolverKind::Inter48, false, 48),
        ("intra E1+E2", SolverKind::Intra48, false, 48),
    ] {
        let hits = (0..10)
            .filter(|&seed| {
                let inst = make_instance(&minimal_scene(Scenario::GeneralizedCamera, kind, 500 + seed));
                let sys = build_equations(&SixPointProblem::new(inst.rig, inst.pcs).unwrap()).unwrap();
                let sys = if drop_bundles { sys.without_ray_bundle() } else { sys };
                complex_roots(&sys, &cfg).is_ok_and(|r| r.count == expected)
            })
            .count();
        pass &= hits >= 8;
        parts.push(format!("{label} {expected}: {hits}/10"));
    }
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

fn enumeration() -> Outcome {
    let expected_totals = [2, 9, 37, 186, 985, 5953];
    let totals: Vec<usize> = (1..=5).map(|n| enumerate_configs(n).len()).collect();
    let six = enumerate_configs(6);
    let mut all = totals.clone();
    all.push(six.len());
    let hist = count_by_cameras(&six);
    let expected_hist = vec![1, 29, 270, 1029, 1776, 1630, 853, 280, 66, 15, 3, 1];
    let types: Vec<usize> = MatchType::ALL
        .iter()
        .map(|&t| six.iter().filter(|g| classify_match_type(g) == t).count())
        .collect();
    let expected_types = vec![2, 9, 63, 7, 412, 5460];
    Outcome {
        pass: all == expected_totals && hist == expected_hist && types == expected_types,
        detail: format!("totals {all:?}, camera histogram {hist:?}, match types {types:?}"),
    }
}

fn iteration_formula() -> Outcome {
    let n = ransac_iterations(0.99, 6, 0.5);
    let mut violations = 0;
    for k in 0..=7 {
        let eps = k as f64 / 10.0;
        let base = ransac_iterations(0.99, 6, eps);
        for p2 in [0.09, 0.59, 0.81, 0.9, 0.99, 1.0] {
            if ransac_iterations_stable(0.99, 6, eps, p2) < base {
                violations += 1;
            }
        }
        if ransac_iterations_stable(0.99, 6, eps, 1.0) != base {
            violations += 1;
        }
    }
    Outcome {
        pass: n == 293 && violations == 0,
        detail: format!("N(0.99, 6, 0.5) = {n}; {violations} grid violations of N_hat >= N"),
    }
}

fn robust_pipeline() -> Outcome {
    let (mut er, mut ed) = (Vec::new(), Vec::new());
    let mut failures = 0;
    for seed in 0..100 {
        let inst = make_instance(&SceneConfig {
            noise_px: 1.0,
            outlier_ratio: 0.3,
            num_pcs: 100,
            seed,
            ..Default::default()
        });
        let cfg = RansacConfig {
            seed,
            ..Default::default()
        };
        match run_ransac(&inst.pcs, &inst.rig, SolverKind::Intra48, &cfg) {
            Ok(r) => {
                er.push(rotation_error(&inst.pose.rotation, &r.pose.rotation));
                ed.push(translation_dir_error(&inst.pose.translation, &r.pose.translation).unwrap_or(180.0));
            }
            Err(_) => {
                failures += 1;
                er.push(180.0);
                ed.push(180.0);
            }
        }
    }
    let (mr, md) = (median(er), median(ed));
    Outcome {
        pass: mr < 0.5 && md < 5.0,
        detail: format!("median eps_R {mr:.3} deg (< 0.5), median eps_t,dir {md:.3} deg (< 5); {failures} runs without a model"),
    }
}

fn noise_free_stability() -> Outcome {
    let cfg = SolverConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in [SolverKind::Intra48, SolverKind::Inter56] {
        let trials = run_stability_experiment(kind, Scenario::TwoCameraRig, 10_000, 7, &cfg);
        let logs: Vec<f64> = trials
            .iter()
            .map(|t| if t.solved { t.log10()[0] } else { f64::INFINITY })
            .collect();
        let failed = trials.iter().filter(|t| !t.solved).count();
        let m = median(logs);
        pass &= m < -6.0;
        parts.push(format!("{kind} median log10 eps_R {m:.2} ({failed} unsolved)"));
    }
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("equation shape", equation_shape),
        ("ray-bundle rank", ray_bundle_rank),
        ("ground-truth containment", containment),
        ("solution counts", solution_counts),
        ("enumeration tables", enumeration),
        ("iteration formula", iteration_formula),
        ("robust pipeline", robust_pipeline),
        ("noise-free stability", noise_free_stability),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} [{:.1} s] {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
