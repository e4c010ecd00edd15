//! Sparse multivariate polynomials with real coefficients.
//!
//! Terms are kept sorted by graded reverse lexicographic order, leading term
//! first. Coefficients below `1e-14` of the operands' scale are pruned after
//! every arithmetic operation, so a polynomial that cancels numerically
//! becomes the zero polynomial.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub const PRUNE_TOL: f64 = 1e-14;
pub const DIVISION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("determinant requested for a {rows}x{cols} matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("polynomial is not divisible (relative remainder {remainder:e})")]
    NotDivisible { remainder: f64 },
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

/// Exponent vector of a monomial in `N` variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial<const N: usize>(pub [u8; N]);

impl<const N: usize> Monomial<N> {
    pub fn one() -> Self {
        Self([0; N])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; N];
        e[i] = 1;
        Self(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
        Self(e)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`; the caller must check `self.divides(other)`.
    pub fn quotient_of(&self, other: &Self) -> Self {
        let mut e = other.0;
        for (a, b) in e.iter_mut().zip(self.0.iter()) {
            *a -= b;
        }
        Self(e)
    }

    pub fn eval(&self, x: &[f64; N]) -> f64 {
        self.0
            .iter()
            .zip(x.iter())
            .map(|(&e, &v)| v.powi(e as i32))
            .product()
    }

    pub fn eval_complex(&self, x: &[Complex64; N]) -> Complex64 {
        self.0
            .iter()
            .zip(x.iter())
            .map(|(&e, &v)| v.powi(e as i32))
            .product()
    }

    /// All monomials of total degree `d`, in descending grevlex order.
    pub fn of_degree(d: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut e = [0u8; N];
        fill(&mut e, 0, d, &mut out);
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    /// All monomials of total degree at most `d`, in descending grevlex order.
    pub fn up_to_degree(d: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for k in (0..=d).rev() {
            out.extend(Self::of_degree(k));
        }
        out
    }
}

fn fill<const N: usize>(e: &mut [u8; N], i: usize, left: u32, out: &mut Vec<Monomial<N>>) {
    if i == N - 1 {
        e[i] = left as u8;
        out.push(Monomial(*e));
        return;
    }
    for k in 0..=left {
        e[i] = k as u8;
        fill(e, i + 1, left - k, out);
    }
}

impl<const N: usize> Ord for Monomial<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for i in (0..N).rev() {
            if self.0[i] != other.0[i] {
                // Smaller exponent in the last differing variable ranks higher.
                return other.0[i].cmp(&self.0[i]);
            }
        }
        Ordering::Equal
    }
}

impl<const N: usize> PartialOrd for Monomial<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial<const N: usize> {
    terms: Vec<(Monomial<N>, f64)>,
}

pub type TriPoly = Polynomial<3>;
pub type QuatPoly = Polynomial<4>;

impl<const N: usize> Polynomial<N> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms(vec![(Monomial::one(), c)])
    }

    pub fn var(i: usize) -> Self {
        Self::from_terms(vec![(Monomial::var(i), 1.0)])
    }

    /// Builds a polynomial from arbitrary terms; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_terms(terms: Vec<(Monomial<N>, f64)>) -> Self {
        let mut map: BTreeMap<Monomial<N>, f64> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert(0.0) += c;
        }
        Self {
            terms: map.into_iter().rev().filter(|(_, c)| *c != 0.0).collect(),
        }
    }

    pub fn terms(&self) -> &[(Monomial<N>, f64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn leading_term(&self) -> Option<(Monomial<N>, f64)> {
        self.terms.first().copied()
    }

    pub fn coeff(&self, m: &Monomial<N>) -> f64 {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map_or(0.0, |(_, c)| *c)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0, |a, (_, c)| a.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|&(m, c)| (m, c * s)).collect(),
        }
    }

    /// Scales so that the largest coefficient magnitude is one.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs_coeff();
        if m == 0.0 {
            return self.clone();
        }
        self.scale(1.0 / m)
    }

    fn prune(mut self, scale: f64) -> Self {
        let tol = PRUNE_TOL * scale;
        self.terms.retain(|(_, c)| c.abs() > tol);
        self
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = self.terms[i];
            let (mb, cb) = other.terms[j];
            match ma.cmp(&mb) {
                Ordering::Greater => {
                    out.push((ma, ca));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb, sign * cb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((ma, ca + sign * cb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend(other.terms[j..].iter().map(|&(m, c)| (m, sign * c)));
        let scale = self.max_abs_coeff().max(other.max_abs_coeff());
        Self { terms: out }.prune(scale)
    }

    fn product(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        // Dense accumulation over the exponent box of the result.
        let mut dims = [0usize; N];
        for k in 0..N {
            let a = self.terms.iter().map(|(m, _)| m.0[k]).max().unwrap_or(0) as usize;
            let b = other.terms.iter().map(|(m, _)| m.0[k]).max().unwrap_or(0) as usize;
            dims[k] = a + b + 1;
        }
        let mut strides = [0usize; N];
        let mut size = 1;
        for k in 0..N {
            strides[k] = size;
            size *= dims[k];
        }
        let index = |m: &Monomial<N>| -> usize {
            m.0.iter().zip(strides.iter()).map(|(&e, &s)| e as usize * s).sum()
        };
        let mut acc = vec![0.0; size];
        let mut used = vec![false; size];
        let mut hit = Vec::new();
        for (ma, ca) in &self.terms {
            let ia = index(ma);
            for (mb, cb) in &other.terms {
                let i = ia + index(mb);
                acc[i] += ca * cb;
                if !used[i] {
                    used[i] = true;
                    hit.push(ma.mul(mb));
                }
            }
        }
        hit.sort_by(|a, b| b.cmp(a));
        let terms = hit.into_iter().map(|m| (m, acc[index(&m)])).collect();
        let scale = self.max_abs_coeff() * other.max_abs_coeff();
        Self { terms }.prune(scale)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, x: &[f64; N]) -> f64 {
        let d = self.degree().unwrap_or(0) as usize;
        let pows = power_table(x, d);
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = *c;
                for k in 0..N {
                    v *= pows[k][m.0[k] as usize];
                }
                v
            })
            .sum()
    }

    pub fn eval_complex(&self, x: &[Complex64; N]) -> Complex64 {
        let d = self.degree().unwrap_or(0) as usize;
        let pows = power_table(x, d);
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = Complex64::new(*c, 0.0);
                for k in 0..N {
                    v *= pows[k][m.0[k] as usize];
                }
                v
            })
            .sum()
    }

    pub fn derivative(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[var] > 0)
            .map(|&(m, c)| {
                let mut e = m.0;
                let k = e[var];
                e[var] -= 1;
                (Monomial(e), c * k as f64)
            })
            .collect();
        // Differentiation keeps distinct monomials distinct but can reorder them.
        let mut p = Self { terms };
        p.terms.sort_by(|a, b| b.0.cmp(&a.0));
        p
    }

    /// Value and gradient at a complex point.
    pub fn eval_gradient_complex(&self, x: &[Complex64; N]) -> (Complex64, [Complex64; N]) {
        let d = self.degree().unwrap_or(0) as usize;
        let pows = power_table(x, d);
        let mut val = Complex64::new(0.0, 0.0);
        let mut grad = [Complex64::new(0.0, 0.0); N];
        for (m, c) in &self.terms {
            let mut v = Complex64::new(*c, 0.0);
            for k in 0..N {
                v *= pows[k][m.0[k] as usize];
            }
            val += v;
            for j in 0..N {
                let e = m.0[j] as usize;
                if e == 0 {
                    continue;
                }
                let mut g = Complex64::new(*c * e as f64, 0.0);
                for k in 0..N {
                    let p = if k == j { e - 1 } else { m.0[k] as usize };
                    g *= pows[k][p];
                }
                grad[j] += g;
            }
        }
        (val, grad)
    }

    pub fn eval_gradient(&self, x: &[f64; N]) -> (f64, [f64; N]) {
        let xc = x.map(|v| Complex64::new(v, 0.0));
        let (v, g) = self.eval_gradient_complex(&xc);
        (v.re, g.map(|z| z.re))
    }

    /// Exact division, checked: the remainder of multivariate long division
    /// must vanish to within `DIVISION_TOL` of the dividend's scale.
    pub fn exact_divide(&self, divisor: &Self) -> Result<Self, PolyError> {
        let (q, r) = self.divide(divisor)?;
        let scale = self.max_abs_coeff();
        let rem = if scale == 0.0 { 0.0 } else { r.max_abs_coeff() / scale };
        if rem > DIVISION_TOL {
            return Err(PolyError::NotDivisible { remainder: rem });
        }
        Ok(q)
    }

    /// Multivariate division by a single polynomial: returns `(q, r)` with
    /// `self = q * divisor + r` and no term of `r` divisible by the leading
    /// monomial of `divisor`.
    pub fn divide(&self, divisor: &Self) -> Result<(Self, Self), PolyError> {
        let (lm, lc) = divisor.leading_term().ok_or(PolyError::DivisionByZero)?;
        let mut work: BTreeMap<Monomial<N>, f64> = self.terms.iter().copied().collect();
        let mut quotient = Vec::new();
        let mut remainder = Vec::new();
        let tol = PRUNE_TOL * self.max_abs_coeff();
        while let Some((m, c)) = work.pop_last() {
            if c.abs() <= tol {
                continue;
            }
            if lm.divides(&m) {
                let f = c / lc;
                let shift = lm.quotient_of(&m);
                quotient.push((shift, f));
                for (dm, dc) in divisor.terms.iter().skip(1) {
                    *work.entry(shift.mul(dm)).or_insert(0.0) -= f * dc;
                }
            } else {
                remainder.push((m, c));
            }
        }
        Ok((Self::from_terms(quotient), Self::from_terms(remainder)))
    }
}

fn power_table<T, const N: usize>(x: &[T; N], d: usize) -> Vec<Vec<T>>
where
    T: Copy + Mul<Output = T> + From<f64>,
{
    x.iter()
        .map(|&v| {
            let mut row = Vec::with_capacity(d + 1);
            row.push(T::from(1.0));
            for k in 1..=d {
                let prev = row[k - 1];
                row.push(prev * v);
            }
            row
        })
        .collect()
}

impl<const N: usize> Add for &Polynomial<N> {
    type Output = Polynomial<N>;
    fn add(self, rhs: Self) -> Polynomial<N> {
        self.combine(rhs, 1.0)
    }
}

impl<const N: usize> Sub for &Polynomial<N> {
    type Output = Polynomial<N>;
    fn sub(self, rhs: Self) -> Polynomial<N> {
        self.combine(rhs, -1.0)
    }
}

impl<const N: usize> Mul for &Polynomial<N> {
    type Output = Polynomial<N>;
    fn mul(self, rhs: Self) -> Polynomial<N> {
        self.product(rhs)
    }
}

impl<const N: usize> Neg for &Polynomial<N> {
    type Output = Polynomial<N>;
    fn neg(self) -> Polynomial<N> {
        self.scale(-1.0)
    }
}

impl<const N: usize> Add for Polynomial<N> {
    type Output = Polynomial<N>;
    fn add(self, rhs: Self) -> Polynomial<N> {
        &self + &rhs
    }
}

impl<const N: usize> Sub for Polynomial<N> {
    type Output = Polynomial<N>;
    fn sub(self, rhs: Self) -> Polynomial<N> {
        &self - &rhs
    }
}

impl<const N: usize> Mul for Polynomial<N> {
    type Output = Polynomial<N>;
    fn mul(self, rhs: Self) -> Polynomial<N> {
        &self * &rhs
    }
}

impl<const N: usize> fmt::Display for Polynomial<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 4] = ["x", "y", "z", "w"];
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if *c < 0.0 { '-' } else { '+' })?;
            } else if *c < 0.0 {
                write!(f, "-")?;
            }
            write!(f, "{}", c.abs())?;
            for (k, &e) in m.0.iter().enumerate() {
                let name = NAMES.get(k).copied().unwrap_or("v");
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// Dense matrix of polynomials stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix<const N: usize> {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial<N>>,
}

impl<const N: usize> PolyMatrix<N> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Polynomial::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Polynomial<N>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial<N> {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Polynomial<N>) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64; N]) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).eval(x))
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> Result<Polynomial<N>, PolyError> {
        if self.rows != self.cols {
            return Err(PolyError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(self.det_rec(&idx, &idx))
    }

    fn det_rec(&self, rows: &[usize], cols: &[usize]) -> Polynomial<N> {
        match rows.len() {
            0 => Polynomial::constant(1.0),
            1 => self.get(rows[0], cols[0]).clone(),
            2 => {
                let a = self.get(rows[0], cols[0]) * self.get(rows[1], cols[1]);
                let b = self.get(rows[0], cols[1]) * self.get(rows[1], cols[0]);
                &a - &b
            }
            _ => {
                let mut acc = Polynomial::zero();
                for (j, &c) in cols.iter().enumerate() {
                    let entry = self.get(rows[0], c);
                    if entry.is_zero() {
                        continue;
                    }
                    let rest: Vec<usize> = cols.iter().copied().filter(|&k| k != c).collect();
                    let minor = self.det_rec(&rows[1..], &rest);
                    let term = entry * &minor;
                    acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
                }
                acc
            }
        }
    }
}
