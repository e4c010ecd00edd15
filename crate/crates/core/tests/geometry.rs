use nalgebra::{Matrix3, Matrix4, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sixpt::geometry::*;

fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let q = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ));
    q.to_rotation_matrix().into_inner()
}

fn random_vec(rng: &mut ChaCha8Rng, r: f64) -> Vector3<f64> {
    Vector3::new(rng.random_range(-r..r), rng.random_range(-r..r), rng.random_range(-r..r))
}

fn homogeneous(r: &Matrix3<f64>, t: &Vector3<f64>) -> Matrix4<f64> {
    let mut h = Matrix4::identity();
    h.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
    h.fixed_view_mut::<3, 1>(0, 3).copy_from(t);
    h
}

fn random_setup(rng: &mut ChaCha8Rng) -> (RigPose, CameraExtrinsic, CameraExtrinsic) {
    let pose = RigPose::new(random_rotation(rng), random_vec(rng, 3.0)).unwrap();
    let c1 = CameraExtrinsic::new(0, random_rotation(rng), random_vec(rng, 1.0)).unwrap();
    let c2 = CameraExtrinsic::new(1, random_rotation(rng), random_vec(rng, 1.0)).unwrap();
    (pose, c1, c2)
}

#[test]
fn cayley_unit_x_is_quarter_turn() {
    let r = cayley_to_rotation(&CayleyVec::new(1.0, 0.0, 0.0));
    let expected = Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
    assert!((r - expected).amax() < 1e-15);
}

#[test]
fn quaternion_examples() {
    let id = quat_to_rotation(&QuatVec::new(1.0, 0.0, 0.0, 0.0)).unwrap();
    assert!((id - Matrix3::identity()).amax() < 1e-15);
    let half = quat_to_rotation(&QuatVec::new(0.0, 1.0, 0.0, 0.0)).unwrap();
    assert!((half - Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0))).amax() < 1e-15);
    assert!(matches!(
        quat_to_rotation(&QuatVec::new(1.0, 1.0, 0.0, 0.0)),
        Err(GeometryError::NotNormalized { .. })
    ));
}

#[test]
fn half_turn_has_no_cayley_vector() {
    let rz = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
    assert!(matches!(rotation_to_cayley(&rz), Err(GeometryError::DegenerateRotation(_))));
}

#[test]
fn camera_pair_matches_homogeneous_product() {
    // T_ii' = T_{cam'}⁻¹ · T_pose · T_cam as a direct 4×4 product.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let (pose, c1, c2) = random_setup(&mut rng);
        let direct = homogeneous(&c2.rotation, &c2.offset).try_inverse().unwrap()
            * homogeneous(&pose.rotation, &pose.translation)
            * homogeneous(&c1.rotation, &c1.offset);
        let (r, t) = compose_camera_pair(&pose, &c1, &c2);
        assert!((homogeneous(&r, &t) - direct).amax() < 1e-12);
    }
}

#[test]
fn rig_essential_matrix_matches_pairwise_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let (pose, c1, c2) = random_setup(&mut rng);
        let (r, t) = compose_camera_pair(&pose, &c1, &c2);
        let oracle = skew(&t) * r;
        let e = essential_matrix(&pose, &c1, &c2);
        assert!((e - oracle).norm() / oracle.norm() < 1e-12);
    }
}

#[test]
fn trivial_camera_pair_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (pose, c1, _) = random_setup(&mut rng);
    let id = CameraExtrinsic::identity(0);
    let (r, t) = compose_camera_pair(&pose, &id, &id);
    assert!((r - pose.rotation).amax() < 1e-15 && (t - pose.translation).amax() < 1e-15);
    let (r, t) = compose_camera_pair(&RigPose::identity(), &c1, &c1);
    assert!((r - Matrix3::identity()).amax() < 1e-15 && t.amax() < 1e-15);
    assert!(essential_matrix(&RigPose::identity(), &c1, &c1).amax() < 1e-15);
    let e = essential_matrix(&pose, &id, &id);
    assert!((e - skew(&pose.translation) * pose.rotation).amax() < 1e-14);
}

#[test]
fn exact_correspondences_satisfy_epipolar_constraint() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let (pose, c1, c2) = random_setup(&mut rng);
        let p = random_vec(&mut rng, 10.0);
        let x = c1.rotation.transpose() * (p - c1.offset);
        let xp = c2.rotation.transpose() * (pose.transform(&p) - c2.offset);
        let e = essential_matrix(&pose, &c1, &c2);
        let pc = RayCorrespondence::new(x / x.norm(), xp / xp.norm(), 0, 1);
        assert!(epipolar_residual(&e, &pc).abs() < 1e-10);
        let scaled = RayCorrespondence::new(pc.x * 2.0, pc.x_prime, 0, 1);
        let off = RayCorrespondence::new(pc.x + Vector3::new(0.1, 0.0, 0.0), pc.x_prime, 0, 1);
        let (r0, r1) = (epipolar_residual(&e, &off), epipolar_residual(&e, &RayCorrespondence { x: off.x * 2.0, ..off }));
        assert!((r1 - 2.0 * r0).abs() < 1e-12 * (1.0 + r0.abs()));
        assert!(epipolar_residual(&e, &scaled).abs() < 1e-10);
    }
}

#[test]
fn error_metric_examples() {
    let t = Vector3::new(1.0, -2.0, 0.5);
    assert_eq!(translation_error(&t, &(-t)), 2.0);
    assert!((translation_dir_error(&t, &(-t)).unwrap() - 180.0).abs() < 1e-12);
    assert!((translation_error(&t, &(2.0 * t)) - 2.0 / 3.0).abs() < 1e-15);
    assert!(translation_dir_error(&t, &(2.0 * t)).unwrap().abs() < 1e-12);
    let r = rotation_from_xyz(0.1, 0.2, 0.3);
    assert_eq!(rotation_error(&r, &r), 0.0);
    let small = rotation_from_xyz(1e-10, 0.0, 0.0);
    let e = rotation_error(&Matrix3::identity(), &small);
    assert!((e - 1e-10f64.to_degrees()).abs() < 1e-20);
}

proptest! {
    #[test]
    fn cayley_round_trip(x in -5.7f64..5.7, y in -5.7f64..5.7, z in -5.7f64..5.7) {
        let q = Vector3::new(x, y, z);
        prop_assume!(q.norm() < 10.0);
        let back = rotation_to_cayley(&cayley_to_rotation(&CayleyVec(q))).unwrap();
        prop_assert!((back.0 - q).amax() < 1e-10 * (1.0 + q.norm_squared()));
    }

    #[test]
    fn cayley_negation_is_transpose(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0) {
        let r = cayley_to_rotation(&CayleyVec::new(x, y, z));
        let rn = cayley_to_rotation(&CayleyVec::new(-x, -y, -z));
        prop_assert!((r.transpose() - rn).amax() < 1e-14);
    }

    #[test]
    fn quaternion_sign_symmetry(w in -1.0f64..1.0, x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        prop_assume!(n > 0.1);
        let a = quat_to_rotation(&QuatVec::new(w / n, x / n, y / n, z / n)).unwrap();
        let b = quat_to_rotation(&QuatVec::new(-w / n, -x / n, -y / n, -z / n)).unwrap();
        prop_assert!((a - b).amax() < 1e-15);
    }

    #[test]
    fn rotation_error_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_rotation(&mut rng);
        let b = random_rotation(&mut rng);
        prop_assert!((rotation_error(&a, &b) - rotation_error(&b, &a)).abs() < 1e-9);
    }
}
