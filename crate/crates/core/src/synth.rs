//! Synthetic scenes: a two-camera rig looking at a ground plane and random
//! planes, and a generalized camera made of omnidirectional cameras.

use nalgebra::{Matrix3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{
    rotation_error, rotation_from_xyz, translation_dir_error, translation_error, CameraExtrinsic,
    RayCorrespondence, RigPose,
};
use crate::minimal::{solve, SolverKind};
use crate::ransac::{angular_error, derive_seed, Aggregation};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    #[default]
    TwoCameraRig,
    GeneralizedCamera,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Motion {
    #[default]
    Forward,
    Sideways,
    Random,
}

/// Which camera pair each correspondence uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Same camera in both views.
    #[default]
    Intra,
    /// Different cameras in the two views.
    Inter,
    /// Distinct camera pairs: `(2j, 2j+1)` with `j = k mod 6` on the
    /// generalized camera, all four pairs in turn on the two-camera rig.
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneConfig {
    pub scenario: Scenario,
    pub pairing: Pairing,
    pub motion: Motion,
    /// Image noise standard deviation in pixels.
    pub noise_px: f64,
    pub num_pcs: usize,
    pub outlier_ratio: f64,
    pub seed: u64,
    pub focal: f64,
    /// Per-axis half range of the random camera mounting perturbation.
    pub mount_perturbation_deg: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::TwoCameraRig,
            pairing: Pairing::Intra,
            motion: Motion::Forward,
            noise_px: 0.0,
            num_pcs: 100,
            outlier_ratio: 0.0,
            seed: 0,
            focal: 400.0,
            mount_perturbation_deg: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CameraModel {
    Pinhole { focal: f64, width: f64, height: f64 },
    Omnidirectional { focal: f64 },
}

impl CameraModel {
    pub fn focal(&self) -> f64 {
        match *self {
            CameraModel::Pinhole { focal, .. } | CameraModel::Omnidirectional { focal } => focal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticInstance {
    pub rig: Vec<CameraExtrinsic>,
    pub pose: RigPose,
    pub pcs: Vec<RayCorrespondence>,
    pub inliers: Vec<bool>,
    /// Scene points in the view-1 rig frame.
    pub points: Vec<Vector3<f64>>,
    pub model: CameraModel,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const GROUND_Y: f64 = 1.5;
const PATCH: f64 = 2.0;
const MAX_TRIES: usize = 10_000;

fn uniform(rng: &mut ChaCha8Rng, half: f64) -> f64 {
    rng.random_range(-half..=half)
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let q = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]));
    q.to_rotation_matrix().into_inner()
}

fn unit_vector(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    let v: [f64; 3] = UnitSphere.sample(rng);
    Vector3::from(v)
}

fn camera_pair(cfg: &SceneConfig, k: usize) -> (usize, usize) {
    let c = k % 2;
    match (cfg.pairing, cfg.scenario) {
        (Pairing::Intra, _) => (c, c),
        (Pairing::Inter, _) => (c, 1 - c),
        (Pairing::Generic, Scenario::TwoCameraRig) => (k % 2, (k / 2) % 2),
        (Pairing::Generic, Scenario::GeneralizedCamera) => {
            let j = k % 6;
            (2 * j, 2 * j + 1)
        }
    }
}

fn to_camera(cam: &CameraExtrinsic, p: &Vector3<f64>) -> Vector3<f64> {
    cam.rotation.transpose() * (p - cam.offset)
}

fn project(model: &CameraModel, pc: &Vector3<f64>) -> Option<Vector3<f64>> {
    match *model {
        CameraModel::Pinhole {
            focal,
            width,
            height,
        } => {
            if pc.z <= 1e-6 {
                return None;
            }
            let u = focal * pc.x / pc.z + width / 2.0;
            let v = focal * pc.y / pc.z + height / 2.0;
            if !(0.0..width).contains(&u) || !(0.0..height).contains(&v) {
                return None;
            }
            Some(Vector3::new(pc.x / pc.z, pc.y / pc.z, 1.0))
        }
        CameraModel::Omnidirectional { .. } => {
            if pc.norm() < 0.5 {
                return None;
            }
            Some(pc.normalize())
        }
    }
}

fn observe(
    inst: &SyntheticInstance,
    (i, j): (usize, usize),
    p: &Vector3<f64>,
) -> Option<RayCorrespondence> {
    let x = project(&inst.model, &to_camera(&inst.rig[i], p))?;
    let p2 = inst.pose.transform(p);
    let x2 = project(&inst.model, &to_camera(&inst.rig[j], &p2))?;
    Some(RayCorrespondence::new(x, x2, i, j))
}

struct Plane {
    center: Vector3<f64>,
    u: Vector3<f64>,
    v: Vector3<f64>,
}

fn random_plane(rng: &mut ChaCha8Rng) -> Plane {
    let center = Vector3::new(uniform(rng, 5.0), uniform(rng, 5.0), rng.random_range(10.0..=20.0));
    let n = unit_vector(rng);
    let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let u = n.cross(&helper).normalize();
    let v = n.cross(&u);
    Plane { center, u, v }
}

fn rig_motion(cfg: &SceneConfig, rng: &mut ChaCha8Rng) -> RigPose {
    let deg = 10f64.to_radians();
    let r = rotation_from_xyz(uniform(rng, deg), uniform(rng, deg), uniform(rng, deg));
    let c = match cfg.motion {
        Motion::Forward => Vector3::new(0.0, 0.0, 3.0),
        Motion::Sideways => Vector3::new(3.0, 0.0, 0.0),
        Motion::Random => unit_vector(rng) * 3.0,
    };
    RigPose {
        rotation: r,
        translation: -(r * c),
    }
}

/// Two forward-looking cameras 1 m apart watching a ground plane and 50
/// random planes.
pub fn make_two_camera_rig(cfg: &SceneConfig) -> SyntheticInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p = cfg.mount_perturbation_deg.to_radians();
    let rig: Vec<CameraExtrinsic> = [-0.5, 0.5]
        .iter()
        .enumerate()
        .map(|(id, &x)| CameraExtrinsic {
            id,
            rotation: rotation_from_xyz(uniform(&mut rng, p), uniform(&mut rng, p), uniform(&mut rng, p)),
            offset: Vector3::new(x, 0.0, 0.0),
        })
        .collect();
    let pose = rig_motion(cfg, &mut rng);
    let mut inst = SyntheticInstance {
        rig,
        pose,
        pcs: Vec::new(),
        inliers: Vec::new(),
        points: Vec::new(),
        model: CameraModel::Pinhole {
            focal: cfg.focal,
            width: WIDTH,
            height: HEIGHT,
        },
    };
    let ground = cfg.num_pcs / 2;
    let mut plane = random_plane(&mut rng);
    for k in 0..cfg.num_pcs {
        let pair = camera_pair(cfg, k);
        if k >= ground {
            plane = random_plane(&mut rng);
        }
        let mut tries = 0;
        loop {
            let point = if k < ground {
                Vector3::new(uniform(&mut rng, 5.0), GROUND_Y, rng.random_range(10.0..=20.0))
            } else {
                plane.center
                    + plane.u * uniform(&mut rng, PATCH / 2.0)
                    + plane.v * uniform(&mut rng, PATCH / 2.0)
            };
            if let Some(pc) = observe(&inst, pair, &point) {
                inst.pcs.push(pc);
                inst.points.push(point);
                break;
            }
            tries += 1;
            if k >= ground && tries % 100 == 0 {
                // The patch is not visible from this camera pair; respawn it.
                plane = random_plane(&mut rng);
            }
            assert!(tries < MAX_TRIES, "could not place a visible point");
        }
    }
    inst.inliers = vec![true; inst.pcs.len()];
    finish(inst, cfg, &mut rng)
}

/// Omnidirectional cameras with random extrinsics: 12 for generic pairing,
/// 2 for inter/intra pairing.
pub fn make_generalized_camera(cfg: &SceneConfig) -> SyntheticInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cameras = if cfg.pairing == Pairing::Generic { 12 } else { 2 };
    let rig: Vec<CameraExtrinsic> = (0..cameras)
        .map(|id| CameraExtrinsic {
            id,
            rotation: random_rotation(&mut rng),
            offset: Vector3::new(uniform(&mut rng, 0.5), uniform(&mut rng, 0.5), uniform(&mut rng, 0.5)),
        })
        .collect();
    let r = rotation_from_xyz(uniform(&mut rng, 0.5), uniform(&mut rng, 0.5), uniform(&mut rng, 0.5));
    let t = Vector3::new(uniform(&mut rng, 2.0), uniform(&mut rng, 2.0), uniform(&mut rng, 2.0));
    let mut inst = SyntheticInstance {
        rig,
        pose: RigPose {
            rotation: r,
            translation: t,
        },
        pcs: Vec::new(),
        inliers: Vec::new(),
        points: Vec::new(),
        model: CameraModel::Omnidirectional { focal: cfg.focal },
    };
    for k in 0..cfg.num_pcs {
        let pair = camera_pair(cfg, k);
        for tries in 0.. {
            let point = unit_vector(&mut rng) * rng.random_range(4.0..=8.0);
            if let Some(pc) = observe(&inst, pair, &point) {
                inst.pcs.push(pc);
                inst.points.push(point);
                break;
            }
            assert!(tries < MAX_TRIES, "could not place a visible point");
        }
    }
    inst.inliers = vec![true; inst.pcs.len()];
    finish(inst, cfg, &mut rng)
}

pub fn make_instance(cfg: &SceneConfig) -> SyntheticInstance {
    match cfg.scenario {
        Scenario::TwoCameraRig => make_two_camera_rig(cfg),
        Scenario::GeneralizedCamera => make_generalized_camera(cfg),
    }
}

fn finish(mut inst: SyntheticInstance, cfg: &SceneConfig, rng: &mut ChaCha8Rng) -> SyntheticInstance {
    add_outliers(&mut inst, cfg.outlier_ratio, rng);
    match inst.model {
        CameraModel::Pinhole { .. } => add_pixel_noise(&mut inst, cfg.noise_px, rng),
        CameraModel::Omnidirectional { .. } => add_bearing_noise(&mut inst, cfg.noise_px, rng),
    }
    inst
}

fn random_observation(model: &CameraModel, rng: &mut ChaCha8Rng) -> Vector3<f64> {
    match *model {
        CameraModel::Pinhole {
            focal,
            width,
            height,
        } => {
            let u = rng.random_range(0.0..width);
            let v = rng.random_range(0.0..height);
            Vector3::new((u - width / 2.0) / focal, (v - height / 2.0) / focal, 1.0)
        }
        CameraModel::Omnidirectional { .. } => unit_vector(rng),
    }
}

/// Replaces the view-2 observation of a random subset of correspondences.
/// Replacements are redrawn until they are at least 1° inconsistent with the
/// true pose, so every labelled outlier is a real outlier.
pub fn add_outliers(inst: &mut SyntheticInstance, ratio: f64, rng: &mut ChaCha8Rng) {
    let n = inst.pcs.len();
    let count = ((ratio * n as f64).round() as usize).min(n);
    let cutoff = 1.0 - 1f64.to_radians().cos();
    for k in rand::seq::index::sample(rng, n, count) {
        loop {
            let candidate = RayCorrespondence {
                x_prime: random_observation(&inst.model, rng),
                ..inst.pcs[k]
            };
            let err = angular_error(&inst.pose, &inst.rig, &candidate, Aggregation::Max)
                .unwrap_or(f64::INFINITY);
            if err > cutoff {
                inst.pcs[k] = candidate;
                inst.inliers[k] = false;
                break;
            }
        }
    }
}

/// Gaussian pixel noise on both observations of every correspondence.
pub fn add_pixel_noise(inst: &mut SyntheticInstance, sigma: f64, rng: &mut ChaCha8Rng) {
    if sigma <= 0.0 {
        return;
    }
    let f = inst.model.focal();
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    let mut perturb = |x: &Vector3<f64>| {
        let p = Vector2::new(x.x / x.z, x.y / x.z) * f;
        let q = p + Vector2::new(normal.sample(rng), normal.sample(rng));
        Vector3::new(q.x / f, q.y / f, 1.0)
    };
    for pc in &mut inst.pcs {
        pc.x = perturb(&pc.x);
        pc.x_prime = perturb(&pc.x_prime);
    }
}

/// Angular Gaussian noise of `sigma / f` radians per tangent axis.
pub fn add_bearing_noise(inst: &mut SyntheticInstance, sigma: f64, rng: &mut ChaCha8Rng) {
    if sigma <= 0.0 {
        return;
    }
    let s = sigma / inst.model.focal();
    let normal = Normal::new(0.0, s).expect("valid sigma");
    let mut perturb = |x: &Vector3<f64>| {
        let b = x.normalize();
        let helper = if b.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let u = b.cross(&helper).normalize();
        let v = b.cross(&u);
        (b + u * normal.sample(rng) + v * normal.sample(rng)).normalize()
    };
    for pc in &mut inst.pcs {
        pc.x = perturb(&pc.x);
        pc.x_prime = perturb(&pc.x_prime);
    }
}

/// Outcome of one minimal solve against ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityTrial {
    pub trial: usize,
    pub solved: bool,
    /// Errors of the root closest to ground truth: degrees, ratio, degrees.
    pub eps_r: f64,
    pub eps_t: f64,
    pub eps_tdir: f64,
}

impl StabilityTrial {
    pub fn log10(&self) -> [f64; 3] {
        let l = |v: f64| v.max(1e-16).log10();
        [l(self.eps_r), l(self.eps_t), l(self.eps_tdir)]
    }

    pub fn accurate(&self, tol_r_deg: f64, tol_t: f64) -> bool {
        self.solved && self.eps_r < tol_r_deg && self.eps_t < tol_t
    }
}

/// Configuration for a minimal-sample instance of the given solver.
pub fn minimal_scene(scenario: Scenario, kind: SolverKind, seed: u64) -> SceneConfig {
    let pairing = match kind {
        SolverKind::Generic64 => Pairing::Generic,
        SolverKind::Inter56 | SolverKind::Inter48 => Pairing::Inter,
        SolverKind::Intra48 => Pairing::Intra,
    };
    SceneConfig {
        scenario,
        pairing,
        num_pcs: 6,
        seed,
        motion: Motion::Random,
        ..SceneConfig::default()
    }
}

/// Errors of the candidate pose closest to ground truth.
pub fn best_errors(truth: &RigPose, poses: &[RigPose]) -> Option<(f64, f64, f64)> {
    poses
        .iter()
        .map(|p| {
            let er = rotation_error(&truth.rotation, &p.rotation);
            let et = translation_error(&truth.translation, &p.translation);
            let ed = translation_dir_error(&truth.translation, &p.translation).unwrap_or(180.0);
            (er, et, ed)
        })
        .min_by(|a, b| (a.0 + a.1).total_cmp(&(b.0 + b.1)))
}

/// Noise-free minimal solves on fresh scenes, one per trial.
pub fn run_stability_experiment(
    kind: SolverKind,
    scenario: Scenario,
    trials: usize,
    seed: u64,
    solver: &SolverConfig,
) -> Vec<StabilityTrial> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let cfg = minimal_scene(scenario, kind, derive_seed(seed, trial as u64));
            let inst = make_instance(&cfg);
            let failed = StabilityTrial {
                trial,
                solved: false,
                eps_r: f64::NAN,
                eps_t: f64::NAN,
                eps_tdir: f64::NAN,
            };
            match solve(&inst.pcs, &inst.rig, kind, solver)
                .ok()
                .and_then(|poses| best_errors(&inst.pose, &poses))
            {
                Some((eps_r, eps_t, eps_tdir)) => StabilityTrial {
                    trial,
                    solved: true,
                    eps_r,
                    eps_t,
                    eps_tdir,
                },
                None => failed,
            }
        })
        .collect()
}

/// Fraction of trials whose best root is within the given tolerances;
/// failed trials count in the denominator.
pub fn success_rate(trials: &[StabilityTrial], tol_r_deg: f64, tol_t: f64) -> f64 {
    if trials.is_empty() {
        return 0.0;
    }
    trials.iter().filter(|t| t.accurate(tol_r_deg, tol_t)).count() as f64 / trials.len() as f64
}
