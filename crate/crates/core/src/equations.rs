//! Construction of the hidden-translation matrix `M(q)` and of the
//! rotation-only polynomial equations derived from its minors.
//!
//! Each correspondence contributes one row of `M(q)`, a 6×4 matrix whose
//! entries are quadratic in the rotation parameters and which satisfies
//! `M(q) (t, 1)ᵀ = 0` at the true pose. Every 4×4 minor vanishes at the true
//! rotation; rows observed by the same pair of cameras additionally make the
//! translation block of their 3×3 sub-matrix rank deficient.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geometry::{CameraExtrinsic, GeometryError, RayCorrespondence};
use crate::poly::{PolyError, PolyMatrix, Polynomial, QuatPoly, TriPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquationError {
    #[error("expected 6 correspondences, got {0}")]
    WrongCount(usize),
    #[error("invalid correspondence {index}: {source}")]
    InvalidCorrespondence {
        index: usize,
        #[source]
        source: GeometryError,
    },
    #[error("operation requires the {expected:?} parametrization")]
    WrongParametrization { expected: Parametrization },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parametrization {
    #[default]
    Cayley,
    Quaternion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SixPointProblem {
    pub rig: Vec<CameraExtrinsic>,
    pub pcs: Vec<RayCorrespondence>,
    pub parametrization: Parametrization,
}

impl SixPointProblem {
    pub fn new(
        rig: Vec<CameraExtrinsic>,
        pcs: Vec<RayCorrespondence>,
    ) -> Result<Self, EquationError> {
        Self::with_parametrization(rig, pcs, Parametrization::Cayley)
    }

    pub fn with_parametrization(
        rig: Vec<CameraExtrinsic>,
        pcs: Vec<RayCorrespondence>,
        parametrization: Parametrization,
    ) -> Result<Self, EquationError> {
        if pcs.len() != 6 {
            return Err(EquationError::WrongCount(pcs.len()));
        }
        for (index, pc) in pcs.iter().enumerate() {
            pc.check(&rig)
                .map_err(|source| EquationError::InvalidCorrespondence { index, source })?;
        }
        Ok(Self {
            rig,
            pcs,
            parametrization,
        })
    }
}

/// Correspondences sharing the same camera in view 1 and the same camera in
/// view 2. Only groups of at least three members are reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayBundleGroup {
    pub rows: Vec<usize>,
    pub cam: usize,
    pub cam_prime: usize,
}

impl RayBundleGroup {
    pub fn is_intra(&self) -> bool {
        self.cam == self.cam_prime
    }

    /// All row triples `k1 < k2 < k3` of the group.
    pub fn triples(&self) -> Vec<[usize; 3]> {
        let r = &self.rows;
        let mut out = Vec::new();
        for a in 0..r.len() {
            for b in a + 1..r.len() {
                for c in b + 1..r.len() {
                    out.push([r[a], r[b], r[c]]);
                }
            }
        }
        out
    }

    fn contains_all(&self, rows: &[usize]) -> bool {
        rows.iter().all(|r| self.rows.contains(r))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquationSystem {
    /// Quotients of the 4×4 minors (degree ≤ 6). Minors whose rows all lie
    /// in one ray-bundle group vanish identically and are omitted.
    pub e1: Vec<TriPoly>,
    /// Quotients of the 3×3 translation-block minors of every ray-bundle
    /// triple (degree ≤ 4).
    pub e2: Vec<TriPoly>,
    pub m: PolyMatrix<3>,
    pub groups: Vec<RayBundleGroup>,
}

impl EquationSystem {
    pub fn polynomials(&self) -> impl Iterator<Item = &TriPoly> {
        self.e1.iter().chain(self.e2.iter())
    }

    /// Copy of the system without the ray-bundle equations.
    pub fn without_ray_bundle(&self) -> Self {
        Self {
            e2: Vec::new(),
            ..self.clone()
        }
    }
}

/// Quaternion counterpart: minors are kept undivided.
#[derive(Debug, Clone, PartialEq)]
pub struct QuatEquationSystem {
    pub e1: Vec<QuatPoly>,
    pub e2: Vec<QuatPoly>,
    pub m: PolyMatrix<4>,
    pub groups: Vec<RayBundleGroup>,
}

/// `q_x² + q_y² + q_z² + 1`.
pub fn cayley_divisor() -> TriPoly {
    let mut d = TriPoly::constant(1.0);
    for k in 0..3 {
        let v = TriPoly::var(k);
        d = &d + &(&v * &v);
    }
    d
}

/// Rotation matrix entries written in terms of a homogeneous quaternion
/// `(w, x, y, z)`, scaled by its squared norm.
fn rotation_entries<const N: usize>(
    w: &Polynomial<N>,
    x: &Polynomial<N>,
    y: &Polynomial<N>,
    z: &Polynomial<N>,
) -> [[Polynomial<N>; 3]; 3] {
    let ww = w * w;
    let xx = x * x;
    let yy = y * y;
    let zz = z * z;
    let two = |p: Polynomial<N>| p.scale(2.0);
    [
        [
            &(&(&ww + &xx) - &yy) - &zz,
            two(&(x * y) - &(w * z)),
            two(&(x * z) + &(w * y)),
        ],
        [
            two(&(x * y) + &(w * z)),
            &(&(&ww - &xx) + &yy) - &zz,
            two(&(y * z) - &(w * x)),
        ],
        [
            two(&(x * z) - &(w * y)),
            two(&(y * z) + &(w * x)),
            &(&(&ww - &xx) - &yy) + &zz,
        ],
    ]
}

fn build_rows<const N: usize>(
    problem: &SixPointProblem,
    rot: &[[Polynomial<N>; 3]; 3],
) -> PolyMatrix<N> {
    let mut rows = Vec::with_capacity(problem.pcs.len());
    for pc in &problem.pcs {
        let rays = pc.rig_rays(&problem.rig);
        let (a, m, b, mp) = (rays.dir, rays.moment, rays.dir_prime, rays.moment_prime);
        // R a as three quadratic polynomials.
        let ra: Vec<Polynomial<N>> = (0..3)
            .map(|i| {
                (0..3).fold(Polynomial::zero(), |acc, j| &acc + &rot[i][j].scale(a[j]))
            })
            .collect();
        let cross = |i: usize, j: usize| &ra[i].scale(b[j]) - &ra[j].scale(b[i]);
        let mut constant = Polynomial::zero();
        for i in 0..3 {
            for j in 0..3 {
                let w = b[i] * m[j] + mp[i] * a[j];
                constant = &constant + &rot[i][j].scale(w);
            }
        }
        rows.push(vec![cross(1, 2), cross(2, 0), cross(0, 1), constant]);
    }
    PolyMatrix::from_rows(rows)
}

/// `M(q)` for the Cayley parametrization; entries are quadratic and the
/// common factor `1 / (q_x² + q_y² + q_z² + 1)` is left out.
pub fn build_m(problem: &SixPointProblem) -> Result<PolyMatrix<3>, EquationError> {
    if problem.parametrization != Parametrization::Cayley {
        return Err(EquationError::WrongParametrization {
            expected: Parametrization::Cayley,
        });
    }
    let rot = rotation_entries(
        &TriPoly::constant(1.0),
        &TriPoly::var(0),
        &TriPoly::var(1),
        &TriPoly::var(2),
    );
    Ok(build_rows(problem, &rot))
}

/// `M(q)` for the quaternion parametrization in `(q_w, q_x, q_y, q_z)`.
pub fn build_m_quaternion(problem: &SixPointProblem) -> Result<PolyMatrix<4>, EquationError> {
    if problem.parametrization != Parametrization::Quaternion {
        return Err(EquationError::WrongParametrization {
            expected: Parametrization::Quaternion,
        });
    }
    let rot = rotation_entries(
        &QuatPoly::var(0),
        &QuatPoly::var(1),
        &QuatPoly::var(2),
        &QuatPoly::var(3),
    );
    Ok(build_rows(problem, &rot))
}

pub fn detect_ray_bundle_groups(pcs: &[RayCorrespondence]) -> Vec<RayBundleGroup> {
    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, pc) in pcs.iter().enumerate() {
        by_pair.entry((pc.cam, pc.cam_prime)).or_default().push(k);
    }
    let mut groups: Vec<RayBundleGroup> = by_pair
        .into_iter()
        .filter(|(_, rows)| rows.len() >= 3)
        .map(|((cam, cam_prime), rows)| RayBundleGroup {
            rows,
            cam,
            cam_prime,
        })
        .collect();
    groups.sort_by_key(|g| g.rows[0]);
    groups
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn structurally_zero(rows: &[usize], groups: &[RayBundleGroup]) -> bool {
    groups.iter().any(|g| g.contains_all(rows))
}

/// Builds both equation sets for the Cayley parametrization.
///
/// The 3×3 minors of the translation block are divided by the common factor
/// once; each 4×4 quotient is then the expansion of the minor along the
/// constant column using those quotients.
pub fn build_equations(problem: &SixPointProblem) -> Result<EquationSystem, EquationError> {
    let m = build_m(problem)?;
    let groups = detect_ray_bundle_groups(&problem.pcs);
    let divisor = cayley_divisor();
    let cols = [0, 1, 2];

    let mut quot3: BTreeMap<Vec<usize>, TriPoly> = BTreeMap::new();
    for rows in subsets(6, 3) {
        let det = m.submatrix(&rows, &cols).det()?;
        quot3.insert(rows, det.exact_divide(&divisor)?);
    }

    let mut e1 = Vec::new();
    for rows in subsets(6, 4) {
        if structurally_zero(&rows, &groups) {
            continue;
        }
        let mut acc = TriPoly::zero();
        for k in 0..4 {
            let rest: Vec<usize> = rows.iter().copied().filter(|&r| r != rows[k]).collect();
            let term = m.get(rows[k], 3) * &quot3[&rest];
            // Cofactor sign of entry (k, 3).
            acc = if (k + 3) % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        e1.push(acc);
    }

    let e2 = groups
        .iter()
        .flat_map(|g| g.triples())
        .map(|t| quot3[&t.to_vec()].clone())
        .collect();

    Ok(EquationSystem { e1, e2, m, groups })
}

/// Quaternion equation sets: undivided 4×4 minors (degree 8) and ray-bundle
/// 3×3 minors (degree 6).
pub fn build_equations_quaternion(
    problem: &SixPointProblem,
) -> Result<QuatEquationSystem, EquationError> {
    let m = build_m_quaternion(problem)?;
    let groups = detect_ray_bundle_groups(&problem.pcs);
    let mut e1 = Vec::new();
    for rows in subsets(6, 4) {
        if structurally_zero(&rows, &groups) {
            continue;
        }
        e1.push(m.submatrix(&rows, &[0, 1, 2, 3]).det()?);
    }
    let mut e2 = Vec::new();
    for g in &groups {
        for t in g.triples() {
            e2.push(m.submatrix(&t, &[0, 1, 2]).det()?);
        }
    }
    Ok(QuatEquationSystem { e1, e2, m, groups })
}
