//! Total-degree homotopy continuation in projective coordinates.
//!
//! The overdetermined system is squared up by three random complex
//! combinations of its equations. Every isolated root of the original system
//! is an isolated root of the squared system, so tracking all Bézout paths
//! finds it; endpoints that do not satisfy the full system, lie at infinity,
//! or are singular are discarded.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::solve_complex;
use super::{polish, ComplexRoots, SolveError, SolverConfig};
use crate::poly::TriPoly;

const MAX_STEP: f64 = 0.05;
const MIN_STEP: f64 = 1e-10;
const MAX_STEPS: usize = 20_000;

type C = Complex64;
type Point = [C; 4];

/// Homogeneous complex polynomial in `(x0, x1, x2, x3)`.
struct HomPoly {
    terms: Vec<([usize; 4], C)>,
    degree: usize,
}

impl HomPoly {
    fn combination(polys: &[TriPoly], weights: &[C], degree: usize) -> Self {
        let mut acc: std::collections::BTreeMap<[usize; 3], C> = Default::default();
        for (p, w) in polys.iter().zip(weights) {
            for (m, c) in p.terms() {
                let key = m.0.map(|e| e as usize);
                *acc.entry(key).or_insert(C::new(0.0, 0.0)) += w * c;
            }
        }
        let terms = acc
            .into_iter()
            .map(|(e, c)| {
                let d = e[0] + e[1] + e[2];
                ([degree - d, e[0], e[1], e[2]], c)
            })
            .collect();
        Self { terms, degree }
    }

    fn eval_grad(&self, x: &Point) -> (C, [C; 4]) {
        let d = self.degree;
        let mut pows = [[C::new(1.0, 0.0); 16]; 4];
        for k in 0..4 {
            for e in 1..=d {
                pows[k][e] = pows[k][e - 1] * x[k];
            }
        }
        let zero = C::new(0.0, 0.0);
        let mut val = zero;
        let mut grad = [zero; 4];
        for (e, c) in &self.terms {
            let f = [pows[0][e[0]], pows[1][e[1]], pows[2][e[2]], pows[3][e[3]]];
            val += c * f[0] * f[1] * f[2] * f[3];
            for j in 0..4 {
                if e[j] == 0 {
                    continue;
                }
                let mut g = c * (e[j] as f64) * pows[j][e[j] - 1];
                for k in 0..4 {
                    if k != j {
                        g *= f[k];
                    }
                }
                grad[j] += g;
            }
        }
        (val, grad)
    }
}

struct Homotopy {
    target: Vec<HomPoly>,
    gamma: C,
    patch: Point,
    degree: usize,
}

impl Homotopy {
    /// Residual `[H; patch]`, Jacobian in `x`, and `∂H/∂τ`.
    fn eval(&self, x: &Point, tau: f64) -> ([C; 4], [[C; 4]; 4], [C; 4]) {
        let zero = C::new(0.0, 0.0);
        let d = self.degree as i32;
        let mut h = [zero; 4];
        let mut jac = [[zero; 4]; 4];
        let mut dt = [zero; 4];
        let x0d = x[0].powi(d);
        let x0d1 = x[0].powi(d - 1) * d as f64;
        for j in 0..3 {
            let (g, gg) = self.target[j].eval_grad(x);
            let s = x[j + 1].powi(d) - x0d;
            let mut sg = [zero; 4];
            sg[0] = -x0d1;
            sg[j + 1] = x[j + 1].powi(d - 1) * d as f64;
            let a = self.gamma * (1.0 - tau);
            h[j] = a * s + g * tau;
            for k in 0..4 {
                jac[j][k] = a * sg[k] + gg[k] * tau;
            }
            dt[j] = g - self.gamma * s;
        }
        let mut p = C::new(-1.0, 0.0);
        for k in 0..4 {
            p += self.patch[k] * x[k];
            jac[3][k] = self.patch[k];
        }
        h[3] = p;
        (h, jac, dt)
    }

    fn velocity(&self, x: &Point, tau: f64) -> Option<Point> {
        let (_, jac, dt) = self.eval(x, tau);
        let rhs = [-dt[0], -dt[1], -dt[2], C::new(0.0, 0.0)];
        solve_complex(jac, rhs)
    }

    fn correct(&self, x: &mut Point, tau: f64, iters: usize) -> bool {
        for _ in 0..iters {
            let (h, jac, _) = self.eval(x, tau);
            let Some(dx) = solve_complex(jac, h.map(|v| -v)) else {
                return false;
            };
            let mut size = 0.0f64;
            let mut norm = 0.0f64;
            for k in 0..4 {
                x[k] += dx[k];
                size = size.max(dx[k].norm());
                norm = norm.max(x[k].norm());
            }
            if size <= 1e-11 * norm.max(1.0) {
                return true;
            }
        }
        false
    }

    fn track(&self, mut x: Point) -> Option<Point> {
        let mut tau = 0.0f64;
        let mut h = 0.01f64;
        for _ in 0..MAX_STEPS {
            if tau >= 1.0 {
                return Some(x);
            }
            let step = h.min(1.0 - tau);
            let k1 = self.velocity(&x, tau)?;
            let k2 = self.velocity(&axpy(&x, &k1, step / 2.0), tau + step / 2.0)?;
            let k3 = self.velocity(&axpy(&x, &k2, step / 2.0), tau + step / 2.0)?;
            let k4 = self.velocity(&axpy(&x, &k3, step), tau + step)?;
            let mut pred = x;
            for k in 0..4 {
                pred[k] += (k1[k] + k2[k] * 2.0 + k3[k] * 2.0 + k4[k]) * (step / 6.0);
            }
            let mut corrected = pred;
            let ok = self.correct(&mut corrected, tau + step, 3)
                && dist(&corrected, &pred) < 0.1 * norm(&corrected).max(1e-3);
            if ok {
                x = corrected;
                tau += step;
                h = (h * 2.0).min(MAX_STEP);
            } else {
                h /= 2.0;
                if h < MIN_STEP {
                    // Singular or diverging endpoint; keep it only if the
                    // path has essentially arrived.
                    return (tau > 1.0 - 1e-6).then_some(x);
                }
            }
        }
        None
    }
}

fn axpy(x: &Point, v: &Point, a: f64) -> Point {
    std::array::from_fn(|k| x[k] + v[k] * a)
}

fn norm(x: &Point) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn dist(a: &Point, b: &Point) -> f64 {
    (0..4).map(|k| (a[k] - b[k]).norm_sqr()).sum::<f64>().sqrt()
}

fn random_unit(rng: &mut ChaCha8Rng) -> C {
    let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    C::new(a.cos(), a.sin())
}

/// Smallest singular value of the Jacobian relative to the largest, used to
/// reject singular (non-isolated) endpoints.
fn jacobian_conditioning(polys: &[TriPoly], x: &[C; 3]) -> f64 {
    let rows: Vec<[C; 3]> = polys.iter().map(|p| p.eval_gradient_complex(x).1).collect();
    let j = nalgebra::DMatrix::from_fn(rows.len(), 3, |r, c| rows[r][c]);
    let sv = j.singular_values();
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

pub(super) fn candidate_roots(polys: &[TriPoly], cfg: &SolverConfig) -> Result<ComplexRoots, SolveError> {
    let degree = polys.iter().filter_map(|p| p.degree()).max().unwrap_or(0) as usize;
    if degree == 0 {
        return Err(SolveError::SolveFailure("constant system".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let target: Vec<HomPoly> = (0..3)
        .map(|_| {
            let w: Vec<C> = polys.iter().map(|_| random_unit(&mut rng)).collect();
            HomPoly::combination(polys, &w, degree)
        })
        .collect();
    let patch: Point = std::array::from_fn(|_| random_unit(&mut rng));
    let homotopy = Homotopy {
        target,
        gamma: random_unit(&mut rng),
        patch,
        degree,
    };

    let roots_of_unity: Vec<C> = (0..degree)
        .map(|k| C::from_polar(1.0, std::f64::consts::TAU * k as f64 / degree as f64))
        .collect();
    let mut found: Vec<[C; 3]> = Vec::new();
    for a in 0..degree {
        for b in 0..degree {
            for c in 0..degree {
                let raw = [
                    C::new(1.0, 0.0),
                    roots_of_unity[a],
                    roots_of_unity[b],
                    roots_of_unity[c],
                ];
                let s: C = (0..4).map(|k| patch[k] * raw[k]).sum();
                let start: Point = raw.map(|v| v / s);
                let Some(end) = homotopy.track(start) else {
                    continue;
                };
                if end[0].norm() < 1e-8 * norm(&end) {
                    continue;
                }
                let affine = [end[1] / end[0], end[2] / end[0], end[3] / end[0]];
                let Some(root) = polish(polys, affine, 12) else {
                    continue;
                };
                let scale = root.iter().fold(1.0f64, |m, v| m.max(v.norm()));
                let residual = polys
                    .iter()
                    .map(|p| p.eval_complex(&root).norm() / scale.powi(p.degree().unwrap_or(0) as i32))
                    .fold(0.0, f64::max);
                if residual > 1e-9 || jacobian_conditioning(polys, &root) < 1e-9 {
                    continue;
                }
                let duplicate = found.iter().any(|f| {
                    (0..3).map(|k| (f[k] - root[k]).norm()).fold(0.0, f64::max)
                        < cfg.dedup_radius * scale
                });
                if !duplicate {
                    found.push(root);
                }
            }
        }
    }
    let count = found.len();
    Ok(ComplexRoots {
        roots: found,
        count,
    })
}
