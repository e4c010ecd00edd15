//! RANSAC over minimal six-correspondence samples with angular scoring.

use std::collections::BTreeMap;

use nalgebra::Vector3;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{compose_camera_pair, CameraExtrinsic, RayCorrespondence, RigPose};
use crate::minimal::{solve, SolverKind};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RansacError {
    #[error("confidence must be < 1 and > 0 (got {0})")]
    Confidence(f64),
    #[error("threshold must be positive (got {0})")]
    Threshold(f64),
    #[error("not enough correspondences to draw a {kind} sample: {reason}")]
    InsufficientData { kind: SolverKind, reason: String },
    #[error("no sample produced a model")]
    NoModelFound,
    #[error("rays are parallel; the point cannot be triangulated")]
    DegenerateTriangulation,
}

/// How the two per-view angular errors are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Max,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RansacConfig {
    pub confidence: f64,
    pub max_iterations: usize,
    pub threshold_deg: f64,
    pub sample_size: usize,
    pub aggregation: Aggregation,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self {
            confidence: 0.99,
            max_iterations: 20_000,
            threshold_deg: 0.1,
            sample_size: 6,
            aggregation: Aggregation::Max,
            seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

impl RansacConfig {
    pub fn validate(&self) -> Result<(), RansacError> {
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(RansacError::Confidence(self.confidence));
        }
        if !(self.threshold_deg > 0.0) {
            return Err(RansacError::Threshold(self.threshold_deg));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RansacResult {
    pub pose: RigPose,
    pub inliers: Vec<bool>,
    pub inlier_count: usize,
    pub iterations: usize,
    pub outlier_ratio: f64,
}

/// `1 − cos θ` for the threshold angle `θ` in degrees.
pub fn angular_cutoff(threshold_deg: f64) -> f64 {
    1.0 - threshold_deg.to_radians().cos()
}

/// Angular reprojection error `1 − cos θ` of one correspondence under a
/// pose, after midpoint triangulation in the view-1 camera frame.
pub fn angular_error(
    pose: &RigPose,
    rig: &[CameraExtrinsic],
    pc: &RayCorrespondence,
    aggregation: Aggregation,
) -> Result<f64, RansacError> {
    let (r, t) = compose_camera_pair(pose, &rig[pc.cam], &rig[pc.cam_prime]);
    let f1 = pc.x.normalize();
    let f2_local = pc.x_prime.normalize();
    // Second camera centre and ray in the first camera frame.
    let c2 = -(r.transpose() * t);
    let f2 = r.transpose() * f2_local;
    let a = f1.dot(&f2);
    let denom = 1.0 - a * a;
    if denom < 1e-12 {
        return Err(RansacError::DegenerateTriangulation);
    }
    let b1 = f1.dot(&c2);
    let b2 = f2.dot(&c2);
    let l1 = (b1 - a * b2) / denom;
    let l2 = (a * b1 - b2) / denom;
    let p: Vector3<f64> = (f1 * l1 + c2 + f2 * l2) / 2.0;
    let p2 = r * p + t;
    if p.norm() == 0.0 || p2.norm() == 0.0 {
        return Err(RansacError::DegenerateTriangulation);
    }
    let e1 = 1.0 - f1.dot(&p.normalize());
    let e2 = 1.0 - f2_local.dot(&p2.normalize());
    Ok(match aggregation {
        Aggregation::Max => e1.max(e2),
        Aggregation::Sum => e1 + e2,
    })
}

/// Inlier decision and error value; degenerate geometry is an outlier.
pub fn angular_inlier_test(
    pose: &RigPose,
    rig: &[CameraExtrinsic],
    pc: &RayCorrespondence,
    threshold_deg: f64,
    aggregation: Aggregation,
) -> (bool, f64) {
    match angular_error(pose, rig, pc, aggregation) {
        Ok(e) => (e < angular_cutoff(threshold_deg), e),
        Err(_) => (false, f64::INFINITY),
    }
}

/// Number of samples needed to draw one outlier-free sample with
/// probability `p` at outlier ratio `eps`.
pub fn ransac_iterations(p: f64, s: usize, eps: f64) -> u64 {
    ransac_iterations_stable(p, s, eps, 1.0)
}

/// Same, when an outlier-free sample only yields an accurate model with
/// probability `p2`.
pub fn ransac_iterations_stable(p: f64, s: usize, eps: f64, p2: f64) -> u64 {
    let w = (p2 * (1.0 - eps)).powi(s as i32);
    if w >= 1.0 {
        return 1;
    }
    if w <= 0.0 {
        return u64::MAX;
    }
    let n = ((1.0 - p).ln() / (1.0 - w).ln()).ceil();
    (n.max(1.0)) as u64
}

/// Draws minimal samples respecting the solver's configuration needs.
#[derive(Debug, Clone)]
pub struct Sampler {
    kind: SolverKind,
    keys: Vec<Vec<usize>>,
}

impl Sampler {
    pub fn new(pcs: &[RayCorrespondence], kind: SolverKind) -> Result<Self, RansacError> {
        let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (k, pc) in pcs.iter().enumerate() {
            by_pair.entry((pc.cam, pc.cam_prime)).or_default().push(k);
        }
        let keys: Vec<Vec<usize>> = match kind {
            SolverKind::Generic64 => by_pair.into_values().collect(),
            SolverKind::Intra48 => by_pair
                .into_iter()
                .filter(|((i, j), v)| i == j && v.len() >= 3)
                .map(|(_, v)| v)
                .collect(),
            SolverKind::Inter56 | SolverKind::Inter48 => by_pair
                .into_iter()
                .filter(|((i, j), v)| i != j && v.len() >= 3)
                .map(|(_, v)| v)
                .collect(),
        };
        let needed = if kind == SolverKind::Generic64 { 6 } else { 2 };
        if keys.len() < needed {
            return Err(RansacError::InsufficientData {
                kind,
                reason: format!("{} eligible camera pairs, {} needed", keys.len(), needed),
            });
        }
        Ok(Self { kind, keys })
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut out = Vec::with_capacity(6);
        if self.kind == SolverKind::Generic64 {
            for g in sample(rng, self.keys.len(), 6) {
                let members = &self.keys[g];
                out.push(members[sample(rng, members.len(), 1).index(0)]);
            }
        } else {
            for g in sample(rng, self.keys.len(), 2) {
                let members = &self.keys[g];
                out.extend(sample(rng, members.len(), 3).into_iter().map(|i| members[i]));
            }
        }
        out
    }
}

/// Per-iteration seed derived from the master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Hypothesis {
    pose: RigPose,
    inliers: Vec<bool>,
    count: usize,
}

fn hypotheses(
    pcs: &[RayCorrespondence],
    rig: &[CameraExtrinsic],
    kind: SolverKind,
    sampler: &Sampler,
    cfg: &RansacConfig,
    iteration: usize,
) -> Option<Hypothesis> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, iteration as u64));
    let idx = sampler.draw(&mut rng);
    let sample: Vec<RayCorrespondence> = idx.iter().map(|&i| pcs[i]).collect();
    let poses = solve(&sample, rig, kind, &cfg.solver).ok()?;
    let mut best: Option<Hypothesis> = None;
    for pose in poses {
        let inliers: Vec<bool> = pcs
            .iter()
            .map(|pc| angular_inlier_test(&pose, rig, pc, cfg.threshold_deg, cfg.aggregation).0)
            .collect();
        let count = inliers.iter().filter(|&&b| b).count();
        if best.as_ref().is_none_or(|b| count > b.count) {
            best = Some(Hypothesis {
                pose,
                inliers,
                count,
            });
        }
    }
    best
}

pub fn run_ransac(
    pcs: &[RayCorrespondence],
    rig: &[CameraExtrinsic],
    kind: SolverKind,
    cfg: &RansacConfig,
) -> Result<RansacResult, RansacError> {
    cfg.validate()?;
    if pcs.len() < cfg.sample_size {
        return Err(RansacError::InsufficientData {
            kind,
            reason: format!("{} correspondences, {} needed", pcs.len(), cfg.sample_size),
        });
    }
    let sampler = Sampler::new(pcs, kind)?;
    let n = pcs.len();
    let batch = rayon::current_num_threads().max(1) * 2;
    let mut best: Option<Hypothesis> = None;
    let mut executed = 0;
    let mut needed = cfg.max_iterations as u64;
    'outer: while executed < cfg.max_iterations {
        let end = (executed + batch).min(cfg.max_iterations);
        let results: Vec<Option<Hypothesis>> = (executed..end)
            .into_par_iter()
            .map(|i| hypotheses(pcs, rig, kind, &sampler, cfg, i))
            .collect();
        // Results are consumed in iteration order so that the outcome does
        // not depend on the thread count.
        for h in results {
            executed += 1;
            if let Some(h) = h {
                if best.as_ref().is_none_or(|b| h.count > b.count) {
                    let eps = 1.0 - h.count as f64 / n as f64;
                    needed = ransac_iterations(cfg.confidence, cfg.sample_size, eps);
                    best = Some(h);
                }
            }
            if best.is_some() && executed as u64 >= needed {
                break 'outer;
            }
        }
    }
    let best = best.ok_or(RansacError::NoModelFound)?;
    Ok(RansacResult {
        pose: best.pose,
        outlier_ratio: 1.0 - best.count as f64 / n as f64,
        inlier_count: best.count,
        inliers: best.inliers,
        iterations: executed,
    })
}
