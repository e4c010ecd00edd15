//! Minimal-solver frontends for six correspondences.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::MatchType;
use crate::equations::{build_equations, EquationError, EquationSystem, SixPointProblem};
use crate::geometry::{CameraExtrinsic, CayleyVec, RayCorrespondence, RigPose};
use crate::solver::{recover_translation, solve_system, SolveError, SolverConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinimalError {
    #[error("configuration mismatch: {kind} solver cannot handle {found}")]
    ConfigurationMismatch { kind: SolverKind, found: String },
    #[error(transparent)]
    Equation(#[from] EquationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Any admissible configuration; 64 solutions for six distinct pairs.
    Generic64,
    /// Two inter-camera triples, 4×4 minors only; 56 solutions.
    Inter56,
    /// Two inter-camera triples with ray-bundle equations; 48 solutions.
    Inter48,
    /// Two intra-camera triples with ray-bundle equations; 48 solutions.
    Intra48,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::Generic64,
        SolverKind::Inter56,
        SolverKind::Inter48,
        SolverKind::Intra48,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Generic64 => "generic",
            Self::Inter56 => "inter56",
            Self::Inter48 => "inter48",
            Self::Intra48 => "intra",
        }
    }

    /// Expected number of complex solutions for the matching configuration.
    pub fn solution_count(self) -> usize {
        match self {
            Self::Generic64 => 64,
            Self::Inter56 => 56,
            Self::Inter48 | Self::Intra48 => 48,
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "generic" | "generic64" => Ok(Self::Generic64),
            "inter56" | "inter" => Ok(Self::Inter56),
            "inter48" => Ok(Self::Inter48),
            "intra" | "intra48" => Ok(Self::Intra48),
            _ => Err(format!("unknown solver {s:?}")),
        }
    }
}

/// Groups correspondence indices by their `(i, i')` camera pair.
pub fn pair_multiplicities(pcs: &[RayCorrespondence]) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, pc) in pcs.iter().enumerate() {
        by_pair.entry((pc.cam, pc.cam_prime)).or_default().push(k);
    }
    by_pair
}

pub fn classify_configuration(pcs: &[RayCorrespondence]) -> Result<MatchType, MinimalError> {
    if pcs.len() != 6 {
        return Err(EquationError::WrongCount(pcs.len()).into());
    }
    let m: Vec<usize> = pair_multiplicities(pcs).values().map(Vec::len).collect();
    Ok(MatchType::from_multiplicities(&m))
}

/// Solver preferred for a configuration: the specialized ones when both
/// triples are intra- or inter-camera, the generic one otherwise.
pub fn auto_kind(pcs: &[RayCorrespondence]) -> Result<SolverKind, MinimalError> {
    let mt = classify_configuration(pcs)?;
    if mt == MatchType::ThreeThree {
        let pairs: Vec<(usize, usize)> = pair_multiplicities(pcs)
            .into_iter()
            .filter(|(_, v)| v.len() == 3)
            .map(|(k, _)| k)
            .collect();
        if pairs.iter().all(|(i, j)| i == j) {
            return Ok(SolverKind::Intra48);
        }
        if pairs.iter().all(|(i, j)| i != j) {
            return Ok(SolverKind::Inter56);
        }
    }
    Ok(SolverKind::Generic64)
}

fn check_kind(kind: SolverKind, pcs: &[RayCorrespondence]) -> Result<MatchType, MinimalError> {
    let mt = classify_configuration(pcs)?;
    let mismatch = |found: String| MinimalError::ConfigurationMismatch { kind, found };
    match kind {
        SolverKind::Generic64 => {
            if matches!(mt, MatchType::SixPair | MatchType::FivePair) {
                return Err(mismatch(format!("match type {mt}")));
            }
        }
        SolverKind::Inter56 | SolverKind::Inter48 | SolverKind::Intra48 => {
            let want_intra = kind == SolverKind::Intra48;
            let triples: Vec<(usize, usize)> = pair_multiplicities(pcs)
                .into_iter()
                .filter(|(_, v)| v.len() == 3)
                .map(|(k, _)| k)
                .collect();
            let ok = mt == MatchType::ThreeThree
                && triples.iter().all(|(i, j)| (i == j) == want_intra);
            if !ok {
                let what = if mt == MatchType::ThreeThree {
                    let intra = triples.iter().filter(|(i, j)| i == j).count();
                    format!("3∪3 with {intra} intra-camera triple(s)")
                } else {
                    format!("match type {mt}")
                };
                return Err(mismatch(what));
            }
        }
    }
    Ok(mt)
}

/// Equation system the given solver works on.
pub fn system_for(kind: SolverKind, problem: &SixPointProblem) -> Result<EquationSystem, MinimalError> {
    check_kind(kind, &problem.pcs)?;
    let sys = build_equations(problem)?;
    Ok(match kind {
        SolverKind::Inter56 => sys.without_ray_bundle(),
        _ => sys,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimalSolution {
    pub kind: SolverKind,
    pub match_type: MatchType,
    pub poses: Vec<RigPose>,
    pub roots: Vec<Vector3<f64>>,
    pub residuals: Vec<f64>,
    pub complex_count: usize,
}

pub fn solve_detailed(
    pcs: &[RayCorrespondence],
    rig: &[CameraExtrinsic],
    kind: SolverKind,
    cfg: &SolverConfig,
) -> Result<MinimalSolution, MinimalError> {
    let match_type = check_kind(kind, pcs)?;
    let problem = SixPointProblem::new(rig.to_vec(), pcs.to_vec())?;
    let sys = system_for(kind, &problem)?;
    let sols = solve_system(&sys, cfg)?;
    let mut out = MinimalSolution {
        kind,
        match_type,
        poses: Vec::new(),
        roots: Vec::new(),
        residuals: Vec::new(),
        complex_count: sols.complex_count,
    };
    for (q, r) in sols.roots.iter().zip(&sols.residuals) {
        if let Ok(t) = recover_translation(&sys.m, q) {
            out.poses.push(RigPose::from_cayley(&CayleyVec(*q), t));
            out.roots.push(*q);
            out.residuals.push(*r);
        }
    }
    Ok(out)
}

/// All candidate poses from six correspondences.
pub fn solve(
    pcs: &[RayCorrespondence],
    rig: &[CameraExtrinsic],
    kind: SolverKind,
    cfg: &SolverConfig,
) -> Result<Vec<RigPose>, MinimalError> {
    Ok(solve_detailed(pcs, rig, kind, cfg)?.poses)
}
