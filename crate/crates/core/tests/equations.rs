use nalgebra::{Matrix3, Vector3, Vector4};
use proptest::prelude::*;
use sixpt::equations::*;
use sixpt::geometry::{rotation_to_cayley, CameraExtrinsic, QuatVec, RayCorrespondence};
use sixpt::minimal::SolverKind;
use sixpt::synth::{make_instance, minimal_scene, Pairing, Scenario, SceneConfig, SyntheticInstance};

fn instance(kind: SolverKind, seed: u64) -> SyntheticInstance {
    make_instance(&minimal_scene(Scenario::GeneralizedCamera, kind, seed))
}

fn truth_q(inst: &SyntheticInstance) -> [f64; 3] {
    rotation_to_cayley(&inst.pose.rotation).unwrap().as_array()
}

fn relative_residual(sys: &EquationSystem, q: &[f64; 3]) -> f64 {
    sys.polynomials()
        .map(|p| p.eval(q).abs() / p.max_abs_coeff())
        .fold(0.0, f64::max)
}

/// `M(q)` rows are the epipolar constraint written as a linear form in
/// `(t, 1)`: evaluating the row at the true rotation and translation gives
/// the essential-matrix residual up to the Cayley scale factor.
#[test]
fn m_vanishes_on_true_translation() {
    for seed in 0..30 {
        let kind = SolverKind::ALL[seed as usize % 4];
        let inst = instance(kind, seed);
        let m = build_m(&SixPointProblem::new(inst.rig.clone(), inst.pcs.clone()).unwrap()).unwrap();
        let q = truth_q(&inst);
        let t = inst.pose.translation;
        let v = Vector4::new(t.x, t.y, t.z, 1.0);
        let num = m.eval(&q);
        assert!((&num * v).norm() < 1e-10 * num.norm().max(1.0));
    }
}

#[test]
fn single_camera_row_at_zero_rotation() {
    let rig = vec![CameraExtrinsic::identity(0)];
    let pcs: Vec<RayCorrespondence> = (0..6)
        .map(|k| {
            let k = k as f64;
            RayCorrespondence::new(Vector3::new(0.1 * k, -0.2, 1.0), Vector3::new(0.3, 0.05 * k, 1.0), 0, 0)
        })
        .collect();
    let m = build_m(&SixPointProblem::new(rig, pcs.clone()).unwrap()).unwrap();
    let at0 = m.eval(&[0.0; 3]);
    for (k, pc) in pcs.iter().enumerate() {
        let c = pc.x.cross(&pc.x_prime);
        let row = Vector3::new(at0[(k, 0)], at0[(k, 1)], at0[(k, 2)]);
        assert!((row - c).norm() < 1e-15 || (row + c).norm() < 1e-15);
        assert_eq!(at0[(k, 3)], 0.0);
    }
}

#[test]
fn equation_counts_and_degrees() {
    let inst = instance(SolverKind::Generic64, 1);
    let generic = build_equations(&SixPointProblem::new(inst.rig, inst.pcs).unwrap()).unwrap();
    assert_eq!((generic.e1.len(), generic.e2.len()), (15, 0));
    assert!(generic.groups.is_empty());
    let intra = instance(SolverKind::Intra48, 2);
    let sys = build_equations(&SixPointProblem::new(intra.rig, intra.pcs).unwrap()).unwrap();
    assert_eq!((sys.e1.len(), sys.e2.len()), (15, 2));
    let groups: Vec<Vec<usize>> = sys.groups.iter().map(|g| g.rows.clone()).collect();
    assert_eq!(groups, vec![vec![0, 2, 4], vec![1, 3, 5]]);
    assert!(sys.e1.iter().all(|p| p.degree().unwrap() <= 6));
    assert!(sys.e2.iter().all(|p| p.degree().unwrap() <= 4));
}

#[test]
fn six_correspondences_in_one_camera_pair() {
    // Twelve intra correspondences alternate between the two cameras; keep
    // the six seen by camera 0.
    let inst = make_instance(&SceneConfig {
        scenario: Scenario::GeneralizedCamera,
        pairing: Pairing::Intra,
        num_pcs: 12,
        seed: 3,
        ..Default::default()
    });
    let pcs: Vec<RayCorrespondence> = inst.pcs.iter().copied().filter(|pc| pc.cam == 0).collect();
    let sys = build_equations(&SixPointProblem::new(inst.rig.clone(), pcs).unwrap()).unwrap();
    assert_eq!(sys.groups.len(), 1);
    assert_eq!(sys.groups[0].rows.len(), 6);
    assert_eq!(sys.e2.len(), 20);
    assert!(relative_residual(&sys, &truth_q(&inst)) < 1e-8);
}

#[test]
fn equations_vanish_at_truth() {
    for seed in 0..40 {
        let kind = SolverKind::ALL[seed as usize % 4];
        let inst = instance(kind, seed);
        let sys = build_equations(&SixPointProblem::new(inst.rig.clone(), inst.pcs.clone()).unwrap()).unwrap();
        assert!(relative_residual(&sys, &truth_q(&inst)) < 1e-8, "{kind} seed {seed}");
    }
}

#[test]
fn ray_bundle_blocks_have_rank_two_at_truth() {
    for seed in 0..50 {
        let kind = if seed % 2 == 0 { SolverKind::Intra48 } else { SolverKind::Inter56 };
        let inst = instance(kind, seed);
        let sys = build_equations(&SixPointProblem::new(inst.rig.clone(), inst.pcs.clone()).unwrap()).unwrap();
        let m = sys.m.eval(&truth_q(&inst));
        for g in &sys.groups {
            let n = Matrix3::from_fn(|i, j| m[(g.rows[i], j)]);
            let mut sv: Vec<f64> = n.singular_values().iter().copied().collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            assert!(sv[2] / sv[0] < 1e-8 && sv[1] / sv[0] > 1e-4, "{kind} seed {seed}: {sv:?}");
        }
    }
}

#[test]
fn null_direction_is_translation() {
    for seed in 0..30 {
        let inst = instance(SolverKind::ALL[seed as usize % 4], seed);
        let m = build_m(&SixPointProblem::new(inst.rig.clone(), inst.pcs.clone()).unwrap()).unwrap();
        let num = m.eval(&truth_q(&inst));
        let svd = num.svd(false, true);
        let k = svd.singular_values.imin();
        let v_t = svd.v_t.unwrap();
        let v = Vector4::new(v_t[(k, 0)], v_t[(k, 1)], v_t[(k, 2)], v_t[(k, 3)]);
        let t = inst.pose.translation;
        let expected = Vector4::new(t.x, t.y, t.z, 1.0).normalize();
        let v = v * v[3].signum();
        assert!((v - expected).norm() < 1e-8);
    }
}

#[test]
fn quaternion_equations_vanish_at_truth() {
    let inst = instance(SolverKind::Intra48, 5);
    let problem = SixPointProblem::with_parametrization(inst.rig.clone(), inst.pcs.clone(), Parametrization::Quaternion).unwrap();
    let sys = build_equations_quaternion(&problem).unwrap();
    for r in 0..6 {
        for c in 0..4 {
            assert!(sys.m.get(r, c).degree().unwrap_or(0) <= 2);
        }
    }
    let q = QuatVec::from_cayley(&rotation_to_cayley(&inst.pose.rotation).unwrap()).0;
    let x = [q[0], q[1], q[2], q[3]];
    assert_eq!(sys.e2.len(), 2);
    for p in sys.e1.iter().chain(&sys.e2) {
        assert!(p.eval(&x).abs() < 1e-8 * p.max_abs_coeff());
        assert!(p.eval(&x.map(|v| -v)).abs() < 1e-8 * p.max_abs_coeff());
    }
    assert!(matches!(build_m(&problem), Err(EquationError::WrongParametrization { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bearing_scale_does_not_move_the_roots(seed in 0u64..1000, k in 0usize..6, s in 0.1f64..10.0) {
        let inst = instance(SolverKind::ALL[(seed % 4) as usize], seed);
        let mut pcs = inst.pcs.clone();
        pcs[k].x *= s;
        let sys = build_equations(&SixPointProblem::new(inst.rig.clone(), pcs).unwrap()).unwrap();
        prop_assert!(relative_residual(&sys, &truth_q(&inst)) < 1e-8);
    }
}
