//! Root finding for the rotation equations and recovery of the translation.
//!
//! Two backends are available. The default builds a Macaulay matrix of the
//! equations, takes its numerical null space and reads the roots off the
//! eigenvectors of a multiplication map. The homotopy backend tracks the
//! paths of a total-degree homotopy and is slower, but it reports every
//! isolated complex root and is used to cross-check solution counts.

pub mod linalg;

mod homotopy;
mod nullspace;

use nalgebra::{Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equations::EquationSystem;
use crate::geometry::{CayleyVec, RigPose};
use crate::poly::{PolyMatrix, TriPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("numerical breakdown: {0}")]
    SolveFailure(String),
    #[error("intra-camera ray bundles require their ray-bundle equations; the system would have a one-parameter family of roots")]
    MissingRayBundleConstraints,
    #[error("translation is at infinity (|v4| / |v| = {ratio:e})")]
    TranslationAtInfinity { ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    NullSpace,
    Homotopy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub backend: Backend,
    /// Relative singular-value threshold when the expansion rank has to be
    /// detected numerically.
    pub rank_tol: f64,
    pub dedup_radius: f64,
    pub imag_tol: f64,
    /// Roots with `‖q‖` above this bound are discarded.
    pub bound: f64,
    /// Maximum residual over the normalized equations for accepted roots.
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            backend: Backend::NullSpace,
            rank_tol: 1e-10,
            dedup_radius: 1e-6,
            imag_tol: 1e-6,
            bound: 10.0,
            residual_tol: 1e-6,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionSet {
    pub roots: Vec<Vector3<f64>>,
    /// Per-root maximum of `|p(q)| / max|coeff(p)|` over the system.
    pub residuals: Vec<f64>,
    /// Number of isolated complex roots seen by the backend.
    pub complex_count: usize,
}

/// Isolated complex roots of a system, as found by a backend.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRoots {
    pub roots: Vec<[Complex64; 3]>,
    pub count: usize,
}

/// Structural shape of a system, used to pick expansion parameters that are
/// known to work for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Shape {
    /// No ray bundles: 64 roots.
    Generic,
    /// Two inter-camera bundles, 4×4 minors only: 56 roots.
    InterMinorsOnly,
    /// Two inter-camera bundles with bundle equations: 48 roots.
    InterWithBundles,
    /// Two intra-camera bundles with bundle equations: 48 roots.
    IntraWithBundles,
    Other,
}

pub(crate) fn shape(sys: &EquationSystem) -> Shape {
    let g = &sys.groups;
    let two_triples = g.len() == 2 && g.iter().all(|g| g.rows.len() == 3);
    match () {
        _ if g.is_empty() && sys.e1.len() == 15 => Shape::Generic,
        _ if two_triples && g.iter().all(|g| !g.is_intra()) => {
            if sys.e2.is_empty() {
                Shape::InterMinorsOnly
            } else {
                Shape::InterWithBundles
            }
        }
        _ if two_triples && g.iter().all(|g| g.is_intra()) && !sys.e2.is_empty() => {
            Shape::IntraWithBundles
        }
        _ => Shape::Other,
    }
}

fn normalized_polys(sys: &EquationSystem) -> Vec<TriPoly> {
    sys.polynomials()
        .filter(|p| !p.is_zero())
        .map(|p| p.normalized())
        .collect()
}

/// Complex roots of the system as delivered by the configured backend,
/// before polishing and filtering.
pub fn complex_roots(sys: &EquationSystem, cfg: &SolverConfig) -> Result<ComplexRoots, SolveError> {
    check_preconditions(sys)?;
    let polys = normalized_polys(sys);
    match cfg.backend {
        Backend::NullSpace => nullspace::candidate_roots(&polys, shape(sys), cfg),
        Backend::Homotopy => homotopy::candidate_roots(&polys, cfg),
    }
}

fn check_preconditions(sys: &EquationSystem) -> Result<(), SolveError> {
    if sys.e2.is_empty() && sys.groups.iter().any(|g| g.is_intra()) {
        return Err(SolveError::MissingRayBundleConstraints);
    }
    if sys.e1.is_empty() && sys.e2.is_empty() {
        return Err(SolveError::SolveFailure("empty equation system".into()));
    }
    Ok(())
}

/// All isolated real roots of `ℰ₁ ∪ ℰ₂` inside the search bound. An empty
/// set is a valid outcome.
pub fn solve_system(sys: &EquationSystem, cfg: &SolverConfig) -> Result<SolutionSet, SolveError> {
    let candidates = complex_roots(sys, cfg)?;
    let polys = normalized_polys(sys);
    let mut out = SolutionSet {
        complex_count: candidates.count,
        ..Default::default()
    };
    for root in &candidates.roots {
        // Clearly complex roots cannot polish into real ones.
        if root.iter().any(|v| v.im.abs() > 1e-2 * (1.0 + v.re.abs())) {
            continue;
        }
        let Some(root) = polish(&polys, *root, 8) else {
            continue;
        };
        if root.iter().any(|v| v.im.abs() > cfg.imag_tol) {
            continue;
        }
        let q = Vector3::new(root[0].re, root[1].re, root[2].re);
        if q.norm() > cfg.bound {
            continue;
        }
        let res = max_residual(&polys, &q);
        if !(res < cfg.residual_tol) {
            continue;
        }
        if out.roots.iter().any(|r| (r - q).amax() < cfg.dedup_radius) {
            continue;
        }
        out.roots.push(q);
        out.residuals.push(res);
    }
    Ok(out)
}

/// Largest residual of the normalized equations at a real point.
pub fn max_residual(polys: &[TriPoly], q: &Vector3<f64>) -> f64 {
    let x = [q.x, q.y, q.z];
    polys
        .iter()
        .map(|p| p.eval(&x).abs() / p.max_abs_coeff())
        .fold(0.0, f64::max)
}

/// Gauss-Newton refinement on the full overdetermined system.
pub(crate) fn polish(polys: &[TriPoly], mut x: [Complex64; 3], iters: usize) -> Option<[Complex64; 3]> {
    let zero = Complex64::new(0.0, 0.0);
    for _ in 0..iters {
        let mut jhj = [[zero; 3]; 3];
        let mut jhf = [zero; 3];
        for p in polys {
            let (v, g) = p.eval_gradient_complex(&x);
            for a in 0..3 {
                for b in 0..3 {
                    jhj[a][b] += g[a].conj() * g[b];
                }
                jhf[a] -= g[a].conj() * v;
            }
        }
        let Some(step) = linalg::solve_complex(jhj, jhf) else {
            break;
        };
        let mut size = 0.0f64;
        let mut scale = 1.0f64;
        for k in 0..3 {
            x[k] += step[k];
            size = size.max(step[k].norm());
            scale = scale.max(x[k].norm());
        }
        if !x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return None;
        }
        if size < 1e-14 * scale {
            break;
        }
    }
    Some(x)
}

/// Translation from the one-dimensional null space of `M(q)`.
pub fn recover_translation(m: &PolyMatrix<3>, q: &Vector3<f64>) -> Result<Vector3<f64>, SolveError> {
    let numeric = m.eval(&[q.x, q.y, q.z]);
    let svd = numeric.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| SolveError::SolveFailure("SVD without right vectors".into()))?;
    let k = svd.singular_values.imin();
    let v = Vector4::new(v_t[(k, 0)], v_t[(k, 1)], v_t[(k, 2)], v_t[(k, 3)]);
    let ratio = v[3].abs() / v.norm();
    if ratio < 1e-10 {
        return Err(SolveError::TranslationAtInfinity { ratio });
    }
    Ok(Vector3::new(v[0], v[1], v[2]) / v[3])
}

/// One pose per root; roots whose translation is at infinity are dropped.
pub fn assemble_poses(sys: &EquationSystem, sols: &SolutionSet) -> Vec<RigPose> {
    sols.roots
        .iter()
        .filter_map(|q| {
            let t = recover_translation(&sys.m, q).ok()?;
            Some(RigPose::from_cayley(&CayleyVec(*q), t))
        })
        .collect()
}
