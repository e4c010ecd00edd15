//! Null-space root finding: the roots' monomial evaluation vectors span the
//! null space of a sufficiently large Macaulay matrix, and multiplication by
//! a linear form acts on that space as a matrix whose eigenvectors encode the
//! roots.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::{near_real_eigenpairs, null_space, numerical_rank, PivotedQr};
use super::{ComplexRoots, Shape, SolveError, SolverConfig};
use crate::poly::{Monomial, TriPoly};

/// Expansion parameters: Macaulay degree, degree of the monomial basis,
/// number of finite roots, and null-space dimension of the full matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Plan {
    degree: u32,
    basis_degree: u32,
    count: usize,
    nullity: usize,
}

fn plan_for(shape: Shape) -> Option<Plan> {
    let plan = |degree, basis_degree, count, nullity| Plan {
        degree,
        basis_degree,
        count,
        nullity,
    };
    match shape {
        Shape::Generic => Some(plan(8, 7, 64, 64)),
        // The minors-only inter system also vanishes on a curve at infinity,
        // which adds one null vector per degree beyond 7.
        Shape::InterMinorsOnly => Some(plan(8, 6, 56, 65)),
        Shape::InterWithBundles | Shape::IntraWithBundles => Some(plan(7, 6, 48, 48)),
        Shape::Other => None,
    }
}

fn monomials_le(d: u32) -> usize {
    let d = d as usize;
    (d + 1) * (d + 2) * (d + 3) / 6
}

struct Macaulay {
    matrix: DMatrix<f64>,
    monomials: Vec<Monomial<3>>,
    index: HashMap<Monomial<3>, usize>,
}

fn macaulay(polys: &[TriPoly], degree: u32) -> Macaulay {
    let monomials = Monomial::<3>::up_to_degree(degree);
    let index: HashMap<_, _> = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    for p in polys {
        let dp = p.degree().unwrap_or(0);
        if dp > degree {
            continue;
        }
        for mult in Monomial::<3>::up_to_degree(degree - dp) {
            rows.push(p.terms().iter().map(|(m, c)| (index[&m.mul(&mult)], *c)).collect());
        }
    }
    let mut matrix = DMatrix::zeros(rows.len(), monomials.len());
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            matrix[(r, c)] = v;
        }
    }
    Macaulay {
        matrix,
        monomials,
        index,
    }
}

pub(super) fn candidate_roots(
    polys: &[TriPoly],
    shape: Shape,
    cfg: &SolverConfig,
) -> Result<ComplexRoots, SolveError> {
    if let Some(plan) = plan_for(shape) {
        let mac = macaulay(polys, plan.degree);
        let n = null_space(&mac.matrix, plan.nullity);
        return roots_from_null_space(&mac, &n, plan, cfg);
    }
    for degree in 6..=10 {
        let mac = macaulay(polys, degree);
        let cols = mac.monomials.len();
        let qr = PivotedQr::new(&mac.matrix.transpose(), cols, cfg.rank_tol);
        let n = qr.q_columns(qr.rank);
        if n.ncols() == 0 {
            return Ok(ComplexRoots {
                roots: Vec::new(),
                count: 0,
            });
        }
        // Rank of the null space restricted to low-degree monomials; the
        // monomials are sorted by descending degree, so every restriction is
        // a trailing block of rows.
        let ranks: Vec<usize> = (0..=degree)
            .map(|d| {
                let k = monomials_le(d);
                numerical_rank(&n.rows(cols - k, k).into_owned(), 1e-8)
            })
            .collect();
        let stable = (1..degree as usize).find(|&d| ranks[d] == ranks[d + 1]);
        if let Some(d) = stable {
            let plan = Plan {
                degree,
                basis_degree: d as u32,
                count: ranks[d],
                nullity: n.ncols(),
            };
            return roots_from_null_space(&mac, &n, plan, cfg);
        }
    }
    Err(SolveError::SolveFailure(
        "the roots do not separate from the null space up to degree 10".into(),
    ))
}

fn roots_from_null_space(
    mac: &Macaulay,
    n: &DMatrix<f64>,
    plan: Plan,
    cfg: &SolverConfig,
) -> Result<ComplexRoots, SolveError> {
    let cols = mac.monomials.len();
    let r = plan.count;
    let n1 = monomials_le(plan.basis_degree + 1);
    let n0 = monomials_le(plan.basis_degree);
    let offset = cols - n1;
    let mut w = n.rows(offset, n1).into_owned();
    if w.ncols() > r {
        let svd = w.svd(true, false);
        let u = svd
            .u
            .ok_or_else(|| SolveError::SolveFailure("SVD without left vectors".into()))?;
        w = u.columns(0, r).into_owned();
    }
    if w.ncols() < r {
        return Err(SolveError::SolveFailure(format!(
            "null space has dimension {} but {} roots were expected",
            w.ncols(),
            r
        )));
    }

    // Well-conditioned basis rows among the monomials of degree ≤ basis_degree.
    let low = w.rows(n1 - n0, n0).transpose();
    let qr = PivotedQr::new(&low, r, 0.0);
    if qr.rank < r {
        return Err(SolveError::SolveFailure("rank-deficient monomial basis".into()));
    }
    let basis: Vec<usize> = qr.perm[..r].iter().map(|&i| i + n1 - n0).collect();
    let row_of = |m: &Monomial<3>| mac.index[m] - offset;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let weights: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let mut s = DMatrix::<f64>::zeros(r, r);
    for (i, &b) in basis.iter().enumerate() {
        let mono = mac.monomials[b + offset];
        for (v, wv) in weights.iter().enumerate() {
            let shifted = row_of(&mono.mul(&Monomial::var(v)));
            for j in 0..r {
                s[(i, j)] += wv * w[(shifted, j)];
            }
        }
    }

    let wb = DMatrix::from_fn(r, r, |i, j| w[(basis[i], j)]);
    let lu = wb.transpose().lu();
    // Action matrix A = S W_B⁻¹, and P maps basis evaluations to (1, x, y, z).
    let action = lu
        .solve(&s.transpose())
        .ok_or_else(|| SolveError::SolveFailure("singular basis block".into()))?
        .transpose();
    let probes = [
        Monomial::one(),
        Monomial::var(0),
        Monomial::var(1),
        Monomial::var(2),
    ];
    let wp = DMatrix::from_fn(4, r, |i, j| w[(row_of(&probes[i]), j)]);
    let p = lu
        .solve(&wp.transpose())
        .ok_or_else(|| SolveError::SolveFailure("singular basis block".into()))?
        .transpose();

    // Real roots have real eigenvalues; others are never returned.
    let pairs = near_real_eigenpairs(&action, 1e-3)
        .ok_or_else(|| SolveError::SolveFailure("eigen-decomposition did not converge".into()))?;
    let mut roots = Vec::with_capacity(pairs.len());
    for (_, u) in &pairs {
        let e = &p * u;
        if e[0].abs() < 1e-12 * e.norm() {
            continue;
        }
        let c = |v: f64| Complex64::new(v / e[0], 0.0);
        roots.push([c(e[1]), c(e[2]), c(e[3])]);
    }
    Ok(ComplexRoots { roots, count: r })
}
