//! File formats: JSON problem files, JSON result reports and the CSV of
//! per-trial stability errors.
//!
//! Camera indices are 0-based and rotations are stored as 9 numbers in
//! row-major order.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::{classify_match_type, count_by_cameras, DirectedMultigraph, MatchType};
use crate::geometry::{rotation_to_cayley, CameraExtrinsic, GeometryError, RayCorrespondence, RigPose};
use crate::minimal::MinimalSolution;
use crate::ransac::RansacResult;
use crate::synth::{StabilityTrial, SyntheticInstance};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid problem: {0}")]
    Geometry(#[from] GeometryError),
}

fn row_major(m: &Matrix3<f64>) -> [f64; 9] {
    std::array::from_fn(|k| m[(k / 3, k % 3)])
}

fn from_row_major(v: &[f64; 9]) -> Matrix3<f64> {
    Matrix3::from_row_slice(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraRecord {
    pub rotation: [f64; 9],
    pub offset: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceRecord {
    pub x: [f64; 3],
    pub x_prime: [f64; 3],
    pub cam: usize,
    pub cam_prime: usize,
    /// Ground-truth label, present in synthetic files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inlier: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
}

impl From<&RigPose> for PoseRecord {
    fn from(p: &RigPose) -> Self {
        Self {
            rotation: row_major(&p.rotation),
            translation: p.translation.into(),
        }
    }
}

impl PoseRecord {
    pub fn to_pose(&self) -> Result<RigPose, GeometryError> {
        RigPose::new(from_row_major(&self.rotation), Vector3::from(self.translation))
    }
}

/// A rig and its correspondences, optionally with the true relative pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub rig: Vec<CameraRecord>,
    pub correspondences: Vec<CorrespondenceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<PoseRecord>,
}

impl ProblemFile {
    pub fn new(rig: &[CameraExtrinsic], pcs: &[RayCorrespondence], truth: Option<&RigPose>) -> Self {
        Self {
            rig: rig
                .iter()
                .map(|c| CameraRecord {
                    rotation: row_major(&c.rotation),
                    offset: c.offset.into(),
                })
                .collect(),
            correspondences: pcs
                .iter()
                .map(|pc| CorrespondenceRecord {
                    x: pc.x.into(),
                    x_prime: pc.x_prime.into(),
                    cam: pc.cam,
                    cam_prime: pc.cam_prime,
                    inlier: None,
                })
                .collect(),
            ground_truth: truth.map(PoseRecord::from),
        }
    }

    pub fn from_instance(inst: &SyntheticInstance) -> Self {
        let mut file = Self::new(&inst.rig, &inst.pcs, Some(&inst.pose));
        for (rec, &inlier) in file.correspondences.iter_mut().zip(&inst.inliers) {
            rec.inlier = Some(inlier);
        }
        file
    }

    pub fn rig(&self) -> Result<Vec<CameraExtrinsic>, IoError> {
        self.rig
            .iter()
            .enumerate()
            .map(|(id, c)| {
                Ok(CameraExtrinsic::new(
                    id,
                    from_row_major(&c.rotation),
                    Vector3::from(c.offset),
                )?)
            })
            .collect()
    }

    /// Correspondences, checked against the rig size.
    pub fn correspondences(&self) -> Result<Vec<RayCorrespondence>, IoError> {
        let rig = self.rig()?;
        self.correspondences
            .iter()
            .map(|r| {
                let pc = RayCorrespondence::new(r.x.into(), r.x_prime.into(), r.cam, r.cam_prime);
                pc.check(&rig)?;
                Ok(pc)
            })
            .collect()
    }

    pub fn ground_truth(&self) -> Result<Option<RigPose>, IoError> {
        Ok(self.ground_truth.as_ref().map(|p| p.to_pose()).transpose()?)
    }

    pub fn from_json(s: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        Self::from_json(&read(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), IoError> {
        write_json(path, self)
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, IoError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    write_text(path, &to_json(value)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedPose {
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
    /// Cayley vector of the rotation; `null` for half turns.
    pub cayley: Option<[f64; 3]>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: String,
    pub match_type: String,
    pub poses: Vec<SolvedPose>,
    pub complex_count: usize,
}

impl From<&MinimalSolution> for SolveReport {
    fn from(s: &MinimalSolution) -> Self {
        Self {
            solver: s.kind.name().to_string(),
            match_type: s.match_type.label().to_string(),
            poses: s
                .poses
                .iter()
                .zip(&s.residuals)
                .map(|(p, &residual)| SolvedPose {
                    rotation: row_major(&p.rotation),
                    translation: p.translation.into(),
                    cayley: rotation_to_cayley(&p.rotation).ok().map(|q| q.as_array()),
                    residual,
                })
                .collect(),
            complex_count: s.complex_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RansacReport {
    pub solver: String,
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
    pub inliers: Vec<bool>,
    pub inlier_count: usize,
    pub iterations: usize,
    pub outlier_ratio: f64,
}

impl RansacReport {
    pub fn new(solver: &str, r: &RansacResult) -> Self {
        Self {
            solver: solver.to_string(),
            rotation: row_major(&r.pose.rotation),
            translation: r.pose.translation.into(),
            inliers: r.inliers.clone(),
            inlier_count: r.inlier_count,
            iterations: r.iterations,
            outlier_ratio: r.outlier_ratio,
        }
    }
}

/// Enumeration summary. Graph vertices are 1-based, as in printed tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumReport {
    pub edges: usize,
    pub total: usize,
    /// Entry `k` counts graphs with `k + 1` cameras.
    pub camera_histogram: Vec<usize>,
    pub match_types: BTreeMap<String, usize>,
    pub graphs: Vec<Vec<[usize; 2]>>,
}

impl EnumReport {
    pub fn new(edges: usize, graphs: &[DirectedMultigraph]) -> Self {
        let mut match_types: BTreeMap<String, usize> = MatchType::ALL
            .iter()
            .map(|m| (m.label().to_string(), 0))
            .collect();
        for g in graphs {
            *match_types
                .entry(classify_match_type(g).label().to_string())
                .or_default() += 1;
        }
        Self {
            edges,
            total: graphs.len(),
            camera_histogram: count_by_cameras(graphs),
            match_types,
            graphs: graphs
                .iter()
                .map(|g| g.edges.iter().map(|&(u, v)| [u + 1, v + 1]).collect())
                .collect(),
        }
    }
}

pub const STABILITY_CSV_HEADER: &str = "trial_id,eps_R_log10,eps_t_log10,eps_tdir_log10";

/// One line per trial; failed trials carry `nan` errors.
pub fn stability_csv(trials: &[StabilityTrial]) -> String {
    let mut out = Vec::new();
    writeln!(out, "{STABILITY_CSV_HEADER}").unwrap();
    for t in trials {
        if t.solved {
            let [r, tr, d] = t.log10();
            writeln!(out, "{},{r:.6},{tr:.6},{d:.6}", t.trial).unwrap();
        } else {
            writeln!(out, "{},nan,nan,nan", t.trial).unwrap();
        }
    }
    String::from_utf8(out).expect("CSV is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{make_instance, SceneConfig};

    #[test]
    fn problem_round_trip() {
        let inst = make_instance(&SceneConfig {
            num_pcs: 8,
            ..Default::default()
        });
        let file = ProblemFile::from_instance(&inst);
        let back = ProblemFile::from_json(&to_json(&file).unwrap()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.correspondences().unwrap(), inst.pcs);
        assert_eq!(back.rig().unwrap(), inst.rig);
        assert_eq!(back.ground_truth().unwrap(), Some(inst.pose));
    }

    #[test]
    fn index_out_of_range_is_rejected() {
        let mut file = ProblemFile::new(&[CameraExtrinsic::identity(0)], &[], None);
        file.correspondences.push(CorrespondenceRecord {
            x: [0.0, 0.0, 1.0],
            x_prime: [0.0, 0.0, 1.0],
            cam: 0,
            cam_prime: 1,
            inlier: None,
        });
        assert!(matches!(
            file.correspondences(),
            Err(IoError::Geometry(GeometryError::CameraIndex { index: 1, .. }))
        ));
    }

    #[test]
    fn csv_marks_failed_trials() {
        let trials = [
            StabilityTrial {
                trial: 0,
                solved: true,
                eps_r: 1e-8,
                eps_t: 1e-9,
                eps_tdir: 1e-7,
            },
            StabilityTrial {
                trial: 1,
                solved: false,
                eps_r: f64::NAN,
                eps_t: f64::NAN,
                eps_tdir: f64::NAN,
            },
        ];
        let csv = stability_csv(&trials);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], STABILITY_CSV_HEADER);
        assert_eq!(lines[1], "0,-8.000000,-9.000000,-7.000000");
        assert_eq!(lines[2], "1,nan,nan,nan");
    }
}
