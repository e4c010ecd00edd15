// Rotations, rig transforms and the epipolar constraint of one camera pair.

use nalgebra::Vector3;
use sixpt::geometry::{
    cayley_to_rotation, epipolar_residual, essential_matrix, rotation_error, rotation_from_xyz,
    rotation_to_cayley, CameraExtrinsic, CayleyVec, RayCorrespondence, RigPose,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let q = CayleyVec::new(0.3, -0.2, 0.1);
    let r = cayley_to_rotation(&q);
    let back = rotation_to_cayley(&r)?;
    println!("cayley {:?} -> R -> {:?}", q.as_array(), back.as_array());

    let pose = RigPose::new(rotation_from_xyz(0.05, -0.1, 0.02), Vector3::new(0.2, -0.1, -3.0))?;
    let left = CameraExtrinsic::new(0, rotation_from_xyz(0.0, 0.03, 0.0), Vector3::new(-0.5, 0.0, 0.0))?;
    let right = CameraExtrinsic::new(1, rotation_from_xyz(0.0, -0.03, 0.0), Vector3::new(0.5, 0.0, 0.0))?;
    let rig = [left, right];

    // A point seen by the left camera in view 1 and the right camera in view 2.
    let point = Vector3::new(1.0, 0.5, 12.0);
    let in_cam = |cam: &CameraExtrinsic, p: Vector3<f64>| cam.rotation.transpose() * (p - cam.offset);
    let x = in_cam(&rig[0], point);
    let x_prime = in_cam(&rig[1], pose.transform(&point));
    let pc = RayCorrespondence::new(x, x_prime, 0, 1);

    let e = essential_matrix(&pose, &rig[0], &rig[1]);
    println!("epipolar residual of an exact correspondence: {:.2e}", epipolar_residual(&e, &pc));

    let nudged = RigPose::new(rotation_from_xyz(0.06, -0.1, 0.02), pose.translation)?;
    let e_bad = essential_matrix(&nudged, &rig[0], &rig[1]);
    println!(
        "with the rotation off by {:.3} deg the residual is {:.2e}",
        rotation_error(&pose.rotation, &nudged.rotation),
        epipolar_residual(&e_bad, &pc)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
