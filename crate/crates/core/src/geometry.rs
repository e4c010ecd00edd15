//! Rotation parametrizations, rig transforms, essential matrices and the
//! error metrics used to score estimated poses.
//!
//! Conventions used throughout the crate:
//!
//! * A camera extrinsic `(Q, s)` maps camera coordinates into the rig frame,
//!   `X_rig = Q X_cam + s`.
//! * A rig pose `(R, t)` maps view-1 rig coordinates into view-2 rig
//!   coordinates, `X_2 = R X_1 + t`.
//! * Angles are radians internally and degrees at the public error-metric
//!   boundary.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when validating user supplied rotations.
pub const ROTATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("quaternion is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("rotation is a half turn, which the Cayley map cannot represent (trace + 1 = {0:e})")]
    DegenerateRotation(f64),
    #[error("translation direction is undefined for a zero vector")]
    ZeroVector,
    #[error("matrix is not a proper rotation (orthogonality error {orthogonality:e}, det {det})")]
    NotARotation { orthogonality: f64, det: f64 },
    #[error("camera index {index} is out of range for a rig with {cameras} cameras")]
    CameraIndex { index: usize, cameras: usize },
}

/// Relative motion of the multi-camera reference frame between two views.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigPose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigPose {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self, GeometryError> {
        check_rotation(&rotation)?;
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Pose from a Cayley vector; the rotation is orthonormal by construction.
    pub fn from_cayley(q: &CayleyVec, translation: Vector3<f64>) -> Self {
        Self {
            rotation: cayley_to_rotation(q),
            translation,
        }
    }

    pub fn homogeneous(&self) -> Matrix4<f64> {
        homogeneous(&self.rotation, &self.translation)
    }

    /// Maps a point from view-1 rig coordinates to view-2 rig coordinates.
    pub fn transform(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }
}

/// Mounting of one perspective (or omnidirectional) camera in the rig.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraExtrinsic {
    pub id: usize,
    pub rotation: Matrix3<f64>,
    pub offset: Vector3<f64>,
}

impl CameraExtrinsic {
    pub fn new(
        id: usize,
        rotation: Matrix3<f64>,
        offset: Vector3<f64>,
    ) -> Result<Self, GeometryError> {
        check_rotation(&rotation)?;
        Ok(Self {
            id,
            rotation,
            offset,
        })
    }

    pub fn identity(id: usize) -> Self {
        Self {
            id,
            rotation: Matrix3::identity(),
            offset: Vector3::zeros(),
        }
    }

    pub fn homogeneous(&self) -> Matrix4<f64> {
        homogeneous(&self.rotation, &self.offset)
    }
}

/// A point seen by camera `cam` in view 1 and camera `cam_prime` in view 2.
///
/// Observations are homogeneous normalized-plane coordinates or bearings and
/// are stored exactly as given (no normalization).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayCorrespondence {
    pub x: Vector3<f64>,
    pub x_prime: Vector3<f64>,
    pub cam: usize,
    pub cam_prime: usize,
}

/// Plücker description of a correspondence in the rig frame: ray directions
/// `a`, `b` and moments `m = s × a`, `m' = s' × b` for both views.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigRays {
    pub dir: Vector3<f64>,
    pub moment: Vector3<f64>,
    pub dir_prime: Vector3<f64>,
    pub moment_prime: Vector3<f64>,
}

impl RayCorrespondence {
    pub fn new(x: Vector3<f64>, x_prime: Vector3<f64>, cam: usize, cam_prime: usize) -> Self {
        Self {
            x,
            x_prime,
            cam,
            cam_prime,
        }
    }

    pub fn is_intra(&self) -> bool {
        self.cam == self.cam_prime
    }

    pub fn check(&self, rig: &[CameraExtrinsic]) -> Result<(), GeometryError> {
        for index in [self.cam, self.cam_prime] {
            if index >= rig.len() {
                return Err(GeometryError::CameraIndex {
                    index,
                    cameras: rig.len(),
                });
            }
        }
        if self.x.norm() == 0.0 || self.x_prime.norm() == 0.0 {
            return Err(GeometryError::ZeroVector);
        }
        Ok(())
    }

    /// Expresses both observation rays in the rig frame.
    pub fn rig_rays(&self, rig: &[CameraExtrinsic]) -> RigRays {
        let c1 = &rig[self.cam];
        let c2 = &rig[self.cam_prime];
        let dir = c1.rotation * self.x;
        let dir_prime = c2.rotation * self.x_prime;
        RigRays {
            dir,
            moment: c1.offset.cross(&dir),
            dir_prime,
            moment_prime: c2.offset.cross(&dir_prime),
        }
    }
}

/// Cayley vector `(q_x, q_y, q_z)` of the homogeneous quaternion `[1, q]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CayleyVec(pub Vector3<f64>);

impl CayleyVec {
    pub fn new(qx: f64, qy: f64, qz: f64) -> Self {
        Self(Vector3::new(qx, qy, qz))
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }
}

/// Unit quaternion `(q_w, q_x, q_y, q_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuatVec(pub Vector4<f64>);

impl QuatVec {
    pub fn new(qw: f64, qx: f64, qy: f64, qz: f64) -> Self {
        Self(Vector4::new(qw, qx, qy, qz))
    }

    pub fn from_cayley(q: &CayleyVec) -> Self {
        let h = Vector4::new(1.0, q.0.x, q.0.y, q.0.z);
        Self(h / h.norm())
    }
}

pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

fn homogeneous(r: &Matrix3<f64>, t: &Vector3<f64>) -> Matrix4<f64> {
    let mut h = Matrix4::identity();
    h.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
    h.fixed_view_mut::<3, 1>(0, 3).copy_from(t);
    h
}

fn check_rotation(r: &Matrix3<f64>) -> Result<(), GeometryError> {
    let orthogonality = (r.transpose() * r - Matrix3::identity()).amax();
    let det = r.determinant();
    if orthogonality > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
        return Err(GeometryError::NotARotation { orthogonality, det });
    }
    Ok(())
}

/// Cayley rotation scaled by `q_x² + q_y² + q_z² + 1`; every entry is a
/// quadratic in the Cayley parameters.
pub fn cayley_rotation_unnormalized(q: &CayleyVec) -> Matrix3<f64> {
    let [x, y, z] = q.as_array();
    Matrix3::new(
        1.0 + x * x - y * y - z * z,
        2.0 * x * y - 2.0 * z,
        2.0 * x * z + 2.0 * y,
        2.0 * x * y + 2.0 * z,
        1.0 - x * x + y * y - z * z,
        2.0 * y * z - 2.0 * x,
        2.0 * x * z - 2.0 * y,
        2.0 * y * z + 2.0 * x,
        1.0 - x * x - y * y + z * z,
    )
}

pub fn cayley_to_rotation(q: &CayleyVec) -> Matrix3<f64> {
    let scale = 1.0 / (q.0.norm_squared() + 1.0);
    cayley_rotation_unnormalized(q) * scale
}

pub fn quat_to_rotation(q: &QuatVec) -> Result<Matrix3<f64>, GeometryError> {
    let norm = q.0.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(GeometryError::NotNormalized { norm });
    }
    let (w, x, y, z) = (q.0[0], q.0[1], q.0[2], q.0[3]);
    Ok(Matrix3::new(
        w * w + x * x - y * y - z * z,
        2.0 * x * y - 2.0 * w * z,
        2.0 * x * z + 2.0 * w * y,
        2.0 * x * y + 2.0 * w * z,
        w * w - x * x + y * y - z * z,
        2.0 * y * z - 2.0 * w * x,
        2.0 * x * z - 2.0 * w * y,
        2.0 * y * z + 2.0 * w * x,
        w * w - x * x - y * y + z * z,
    ))
}

/// Inverse Cayley map. Fails for (near) half-turn rotations.
pub fn rotation_to_cayley(r: &Matrix3<f64>) -> Result<CayleyVec, GeometryError> {
    let denom = r.trace() + 1.0;
    if denom < 1e-9 {
        return Err(GeometryError::DegenerateRotation(denom));
    }
    Ok(CayleyVec::new(
        (r[(2, 1)] - r[(1, 2)]) / denom,
        (r[(0, 2)] - r[(2, 0)]) / denom,
        (r[(1, 0)] - r[(0, 1)]) / denom,
    ))
}

/// Rotation `R_z(c) R_y(b) R_x(a)`: rotate about x, then y, then z.
pub fn rotation_from_xyz(a: f64, b: f64, c: f64) -> Matrix3<f64> {
    let rx = Matrix3::new(1.0, 0.0, 0.0, 0.0, a.cos(), -a.sin(), 0.0, a.sin(), a.cos());
    let ry = Matrix3::new(b.cos(), 0.0, b.sin(), 0.0, 1.0, 0.0, -b.sin(), 0.0, b.cos());
    let rz = Matrix3::new(c.cos(), -c.sin(), 0.0, c.sin(), c.cos(), 0.0, 0.0, 0.0, 1.0);
    rz * ry * rx
}

/// Relative rotation and translation from camera `i` in view 1 to camera
/// `i'` in view 2.
pub fn compose_camera_pair(
    pose: &RigPose,
    cam: &CameraExtrinsic,
    cam_prime: &CameraExtrinsic,
) -> (Matrix3<f64>, Vector3<f64>) {
    let qt = cam_prime.rotation.transpose();
    let r = qt * pose.rotation * cam.rotation;
    let t = qt * (pose.rotation * cam.offset + pose.translation - cam_prime.offset);
    (r, t)
}

/// Essential matrix of one camera pair written directly in terms of the rig
/// pose and the two extrinsics.
pub fn essential_matrix(
    pose: &RigPose,
    cam: &CameraExtrinsic,
    cam_prime: &CameraExtrinsic,
) -> Matrix3<f64> {
    let r = &pose.rotation;
    let inner = r * skew(&cam.offset) + skew(&(pose.translation - cam_prime.offset)) * r;
    cam_prime.rotation.transpose() * inner * cam.rotation
}

pub fn epipolar_residual(e: &Matrix3<f64>, pc: &RayCorrespondence) -> f64 {
    pc.x_prime.dot(&(e * pc.x))
}

fn clamped_acos(c: f64) -> f64 {
    c.clamp(-1.0, 1.0).acos()
}

/// Angle of `R_gt Rᵀ`, in degrees.
///
/// Evaluated as `atan2(sin θ, cos θ)` with `cos θ = (trace − 1) / 2`; the
/// plain arccos loses about eight digits near zero.
pub fn rotation_error(r_gt: &Matrix3<f64>, r: &Matrix3<f64>) -> f64 {
    let d = r_gt * r.transpose();
    let c = ((d.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let axis = Vector3::new(d[(2, 1)] - d[(1, 2)], d[(0, 2)] - d[(2, 0)], d[(1, 0)] - d[(0, 1)]);
    let s = axis.norm() / 2.0;
    if c < -0.5 {
        // Near a half turn the skew part vanishes; arccos is well conditioned there.
        return clamped_acos(c).to_degrees();
    }
    s.atan2(c).to_degrees()
}

/// Relative translation error `2‖t_gt − t‖ / (‖t_gt‖ + ‖t‖)`.
pub fn translation_error(t_gt: &Vector3<f64>, t: &Vector3<f64>) -> f64 {
    let denom = t_gt.norm() + t.norm();
    if denom == 0.0 {
        return 0.0;
    }
    2.0 * (t_gt - t).norm() / denom
}

/// Angle between the two translation directions, in degrees.
pub fn translation_dir_error(t_gt: &Vector3<f64>, t: &Vector3<f64>) -> Result<f64, GeometryError> {
    let n = t_gt.norm() * t.norm();
    if n == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    Ok(t_gt.cross(t).norm().atan2(t_gt.dot(t)).to_degrees())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cayley_zero_is_identity() {
        let r = cayley_to_rotation(&CayleyVec::new(0.0, 0.0, 0.0));
        assert_eq!(r, Matrix3::identity());
    }

    #[test]
    fn cayley_unit_x_is_quarter_turn() {
        let r = cayley_to_rotation(&CayleyVec::new(1.0, 0.0, 0.0));
        let expected = Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        assert_relative_eq!(r, expected, epsilon = 1e-15);
    }

    #[test]
    fn cayley_negation_transposes() {
        let q = CayleyVec::new(0.3, -1.2, 0.7);
        let r = cayley_to_rotation(&q);
        let r_neg = cayley_to_rotation(&CayleyVec(-q.0));
        assert_relative_eq!(r.transpose(), r_neg, epsilon = 1e-15);
        assert_relative_eq!(r.transpose() * r, Matrix3::identity(), epsilon = 1e-14);
        assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn quaternion_examples() {
        let id = quat_to_rotation(&QuatVec::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(id, Matrix3::identity());
        let half = quat_to_rotation(&QuatVec::new(0.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(half, Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0)));
        let q = QuatVec(Vector4::new(0.5, -0.1, 0.7, 0.2).normalize());
        let neg = QuatVec(-q.0);
        assert_eq!(quat_to_rotation(&q).unwrap(), quat_to_rotation(&neg).unwrap());
        assert!(matches!(
            quat_to_rotation(&QuatVec::new(1.0, 1.0, 0.0, 0.0)),
            Err(GeometryError::NotNormalized { .. })
        ));
    }

    #[test]
    fn quaternion_agrees_with_cayley() {
        let q = CayleyVec::new(0.4, 0.25, -0.9);
        let rq = quat_to_rotation(&QuatVec::from_cayley(&q)).unwrap();
        assert_relative_eq!(rq, cayley_to_rotation(&q), epsilon = 1e-14);
    }

    #[test]
    fn inverse_cayley() {
        let c = rotation_to_cayley(&Matrix3::identity()).unwrap();
        assert_eq!(c.0, Vector3::zeros());
        let q = CayleyVec::new(0.3, -0.2, 0.1);
        let back = rotation_to_cayley(&cayley_to_rotation(&q)).unwrap();
        assert_relative_eq!(back.0, q.0, epsilon = 1e-12);
        let half_z = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
        assert!(matches!(
            rotation_to_cayley(&half_z),
            Err(GeometryError::DegenerateRotation(_))
        ));
    }

    #[test]
    fn single_camera_pair_reduces_to_pose() {
        let pose = RigPose::from_cayley(&CayleyVec::new(0.1, 0.2, -0.3), Vector3::new(1.0, 2.0, 3.0));
        let cam = CameraExtrinsic::identity(0);
        let (r, t) = compose_camera_pair(&pose, &cam, &cam);
        assert_eq!(r, pose.rotation);
        assert_eq!(t, pose.translation);

        let cam = CameraExtrinsic::new(
            1,
            rotation_from_xyz(0.1, 0.4, -0.2),
            Vector3::new(0.5, -0.1, 0.2),
        )
        .unwrap();
        let (r, t) = compose_camera_pair(&RigPose::identity(), &cam, &cam);
        assert_relative_eq!(r, Matrix3::identity(), epsilon = 1e-15);
        assert_relative_eq!(t, Vector3::zeros(), epsilon = 1e-15);
    }

    #[test]
    fn essential_examples() {
        let pose = RigPose::from_cayley(&CayleyVec::new(-0.2, 0.1, 0.3), Vector3::new(0.3, -1.0, 2.0));
        let cam = CameraExtrinsic::identity(0);
        let e = essential_matrix(&pose, &cam, &cam);
        assert_relative_eq!(e, skew(&pose.translation) * pose.rotation, epsilon = 1e-15);

        let cam = CameraExtrinsic::new(0, rotation_from_xyz(0.3, 0.0, 1.0), Vector3::new(1.0, 2.0, 0.5))
            .unwrap();
        let e = essential_matrix(&RigPose::identity(), &cam, &cam);
        assert!(e.amax() < 1e-15);
    }

    #[test]
    fn residual_is_bilinear() {
        let e = Matrix3::new(0.1, 0.4, -0.3, 0.2, 0.9, 0.7, -0.5, 0.1, 0.05);
        let pc = RayCorrespondence::new(Vector3::new(0.1, 0.2, 1.0), Vector3::new(-0.3, 0.4, 1.0), 0, 0);
        let doubled = RayCorrespondence {
            x: pc.x * 2.0,
            ..pc
        };
        assert_relative_eq!(
            epipolar_residual(&e, &doubled),
            2.0 * epipolar_residual(&e, &pc),
            epsilon = 1e-15
        );
        // x' orthogonal to E x gives zero.
        let ex = e * pc.x;
        let orth = ex.cross(&Vector3::new(0.3, 0.1, 0.2));
        let pc = RayCorrespondence {
            x_prime: orth,
            ..pc
        };
        assert!(epipolar_residual(&e, &pc).abs() < 1e-15);
    }

    #[test]
    fn error_metric_examples() {
        let r = rotation_from_xyz(0.2, -0.1, 0.4);
        assert_eq!(rotation_error(&r, &r), 0.0);
        let t = Vector3::new(1.0, -2.0, 0.5);
        assert_relative_eq!(translation_error(&t, &-t), 2.0, epsilon = 1e-15);
        assert_relative_eq!(translation_dir_error(&t, &-t).unwrap(), 180.0, epsilon = 1e-12);
        assert_relative_eq!(translation_error(&t, &(2.0 * t)), 2.0 / 3.0, epsilon = 1e-15);
        assert!(translation_dir_error(&t, &(2.0 * t)).unwrap() < 1e-6);
        assert_eq!(
            translation_dir_error(&t, &Vector3::zeros()),
            Err(GeometryError::ZeroVector)
        );
    }

    #[test]
    fn rejects_bad_rotation() {
        let bad = Matrix3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(RigPose::new(bad, Vector3::zeros()).is_err());
        let reflection = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(CameraExtrinsic::new(0, reflection, Vector3::zeros()).is_err());
    }
}
