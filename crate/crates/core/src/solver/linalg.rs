//! Dense kernels the root finder needs beyond what nalgebra offers directly:
//! a rank-revealing Householder QR with column pivoting, null-space
//! extraction, and eigenvectors for the real eigenvalues of a matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Column-pivoted Householder QR of an `m × n` matrix, stopped early at a
/// requested rank or when the remaining columns fall below a tolerance.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    m: usize,
    /// Householder vectors (below the diagonal, implicit unit head) and `R`.
    data: Vec<f64>,
    betas: Vec<f64>,
    /// `perm[k]` is the original index of the `k`-th pivot column.
    pub perm: Vec<usize>,
    pub rank: usize,
    pub diag: Vec<f64>,
}

impl PivotedQr {
    /// Factorizes `a`. Elimination stops after `max_rank` steps or once the
    /// largest remaining column norm drops to `tol` times the first pivot
    /// norm.
    pub fn new(a: &DMatrix<f64>, max_rank: usize, tol: f64) -> Self {
        let (m, n) = a.shape();
        let mut data = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut betas = Vec::new();
        let mut diag = Vec::new();
        let steps = max_rank.min(m).min(n);
        let mut first = 0.0;
        let mut rank = 0;
        for k in 0..steps {
            // Remaining column norms, recomputed exactly.
            let mut best = k;
            let mut best_norm = -1.0;
            for j in k..n {
                let col = &data[j * m + k..j * m + m];
                let s: f64 = col.iter().map(|v| v * v).sum();
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            let norm = best_norm.sqrt();
            if k == 0 {
                first = norm;
            }
            if norm == 0.0 || norm <= tol * first {
                break;
            }
            if best != k {
                for i in 0..m {
                    data.swap(k * m + i, best * m + i);
                }
                perm.swap(k, best);
            }
            // Householder reflector for column k, rows k..m.
            let x0 = data[k * m + k];
            let alpha = if x0 >= 0.0 { -norm } else { norm };
            let v0 = x0 - alpha;
            for i in k + 1..m {
                data[k * m + i] /= v0;
            }
            let beta = -v0 / alpha;
            data[k * m + k] = alpha;
            for j in k + 1..n {
                let mut s = data[j * m + k];
                for i in k + 1..m {
                    s += data[k * m + i] * data[j * m + i];
                }
                s *= beta;
                data[j * m + k] -= s;
                for i in k + 1..m {
                    data[j * m + i] -= s * data[k * m + i];
                }
            }
            betas.push(beta);
            diag.push(alpha.abs());
            rank += 1;
        }
        Self {
            m,
            data,
            betas,
            perm,
            rank,
            diag,
        }
    }

    /// Columns `from..m` of the orthogonal factor `Q`.
    pub fn q_columns(&self, from: usize) -> DMatrix<f64> {
        let m = self.m;
        let cols = m - from;
        let mut q = DMatrix::<f64>::zeros(m, cols);
        for c in 0..cols {
            q[(from + c, c)] = 1.0;
        }
        let out = q.as_mut_slice();
        for k in (0..self.rank).rev() {
            let v = &self.data[k * m..k * m + m];
            let beta = self.betas[k];
            for c in 0..cols {
                let col = &mut out[c * m..c * m + m];
                let mut s = col[k];
                for i in k + 1..m {
                    s += v[i] * col[i];
                }
                s *= beta;
                col[k] -= s;
                for i in k + 1..m {
                    col[i] -= s * v[i];
                }
            }
        }
        q
    }
}

/// Orthonormal basis of the right null space of `a` with the given
/// dimension.
pub fn null_space(a: &DMatrix<f64>, nullity: usize) -> DMatrix<f64> {
    let n = a.ncols();
    let qr = PivotedQr::new(&a.transpose(), n.saturating_sub(nullity), 0.0);
    qr.q_columns(qr.rank)
}

/// Numerical rank from singular values: entries above `tol · σ_max`.
pub fn numerical_rank(a: &DMatrix<f64>, tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Eigenpairs of a real square matrix whose eigenvalues are real to within
/// `imag_tol · (1 + |λ|)`, together with the total number of eigenvalues.
///
/// Eigenvalues come from the real Schur form; each selected eigenvector is
/// found by two steps of inverse iteration at the real part of its
/// eigenvalue.
pub fn near_real_eigenpairs(a: &DMatrix<f64>, imag_tol: f64) -> Option<Vec<(f64, DVector<f64>)>> {
    let n = a.nrows();
    let values = nalgebra::linalg::Schur::try_new(a.clone(), 1e-14, 10_000)?.complex_eigenvalues();
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let start = DVector::from_fn(n, |i, _| 1.0 + 0.1 * ((i * 7919) % 13) as f64);
    let mut out = Vec::new();
    for l in values.iter() {
        if l.im.abs() > imag_tol * (1.0 + l.re.abs()) {
            continue;
        }
        let mut shift = l.re;
        let mut v = None;
        for _ in 0..4 {
            let shifted = a - DMatrix::identity(n, n) * shift;
            let lu = shifted.lu();
            if let Some(x) = lu.solve(&start).and_then(|x| {
                let x = x.normalize();
                lu.solve(&x)
            }) {
                if x.iter().all(|v| v.is_finite()) && x.norm() > 0.0 {
                    v = Some(x.normalize());
                    break;
                }
            }
            shift += 1e-13 * scale;
        }
        out.push((l.re, v?));
    }
    Some(out)
}

/// Solves the small dense complex system `a x = b` by Gaussian elimination
/// with partial pivoting. Returns `None` when singular.
pub fn solve_complex<const N: usize>(
    mut a: [[Complex64; N]; N],
    mut b: [Complex64; N],
) -> Option<[Complex64; N]> {
    for k in 0..N {
        let p = (k..N).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))?;
        if a[p][k].norm() == 0.0 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..N {
            let f = a[i][k] / a[k][k];
            for j in k..N {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
            let v = b[k];
            b[i] -= f * v;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); N];
    for k in (0..N).rev() {
        let mut s = b[k];
        for j in k + 1..N {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
        let mut s = seed;
        DMatrix::from_fn(m, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn null_space_of_rank_deficient_matrix() {
        // 6×9 of rank 4: nullity 5.
        let a = sample(6, 4, 1) * sample(4, 9, 2);
        let n = null_space(&a, 5);
        assert_eq!(n.shape(), (9, 5));
        assert!((&a * &n).amax() < 1e-12);
        assert_relative_eq!(n.transpose() * &n, DMatrix::identity(5, 5), epsilon = 1e-12);
    }

    #[test]
    fn rank_detection_by_tolerance() {
        let a = sample(10, 3, 3) * sample(3, 7, 4);
        let qr = PivotedQr::new(&a, 7, 1e-10);
        assert_eq!(qr.rank, 3);
        assert_eq!(numerical_rank(&a, 1e-10), 3);
    }

    #[test]
    fn real_eigenpairs_of_known_matrix() {
        // Rotation block with eigenvalues ±i and a real eigenvalue 2.
        let a = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
        let pairs = near_real_eigenpairs(&a, 1e-6).unwrap();
        assert_eq!(pairs.len(), 1);
        let (l, v) = &pairs[0];
        assert_relative_eq!(*l, 2.0, epsilon = 1e-12);
        assert!((&a * v - v * *l).norm() < 1e-10);
    }

    #[test]
    fn small_complex_solve() {
        let c = |r| Complex64::new(r, 0.0);
        let a = [[c(0.0), c(2.0)], [c(1.0), c(1.0)]];
        let x = solve_complex(a, [c(4.0), c(3.0)]).unwrap();
        assert_relative_eq!(x[0].re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(x[1].re, 2.0, epsilon = 1e-15);
        assert!(solve_complex([[c(1.0), c(1.0)], [c(1.0), c(1.0)]], [c(1.0), c(2.0)]).is_none());
    }
}
