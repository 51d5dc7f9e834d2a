//! Symmetric eigenvalue extremes at any precision: Householder reduction to
//! tridiagonal form, then bisection on Sturm counts.

use crate::matrix::Matrix;
use dashu_int::{IBig, UBig};

use crate::scalar::{Backend, Rational, Real};

/// Symmetric tridiagonal matrix: `diag[i]`, `off[i]` couples `i` and `i+1`.
#[derive(Clone, Debug)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

/// Orthogonal similarity reduction of a symmetric matrix.
pub fn tridiagonalize<T: Real>(a: &Matrix<T>) -> Tridiagonal<T> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "matrix must be square");
    let ctx = a[(0, 0)].ctx();
    let zero = T::zero(ctx);
    let two = T::from_f64(2.0, ctx);
    let mut m: Vec<T> = (0..n * n).map(|i| a[(i / n, i % n)].clone()).collect();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<T> = (0..len).map(|i| m[(k + 1 + i) * n + k].clone()).collect();
        let xnorm_sq = x.iter().fold(zero.clone(), |s, v| s + v.clone() * v.clone());
        if xnorm_sq.is_zero() {
            off.push(zero.clone());
            continue;
        }
        let xnorm = xnorm_sq.sqrt().expect("non-negative");
        let alpha = if x[0] > zero { -xnorm } else { xnorm };
        let mut v = x;
        v[0] = v[0].clone() - alpha.clone();
        let vv = v.iter().fold(zero.clone(), |s, e| s + e.clone() * e.clone());
        if vv.is_zero() {
            off.push(alpha);
            continue;
        }
        let beta = two.clone() / vv;
        // p = β A₂₂ v, w = p - (β pᵗv / 2) v, A₂₂ ← A₂₂ - v wᵗ - w vᵗ.
        let mut p = Vec::with_capacity(len);
        for i in 0..len {
            let row = &m[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            let s = row
                .iter()
                .zip(&v)
                .fold(zero.clone(), |s, (a, b)| s + a.clone() * b.clone());
            p.push(beta.clone() * s);
        }
        let pv = p.iter().zip(&v).fold(zero.clone(), |s, (a, b)| s + a.clone() * b.clone());
        let kcoef = beta * pv / two.clone();
        let w: Vec<T> = p
            .into_iter()
            .zip(&v)
            .map(|(pi, vi)| pi - kcoef.clone() * vi.clone())
            .collect();
        for i in 0..len {
            let base = (k + 1 + i) * n + k + 1;
            for j in 0..len {
                let cur = std::mem::replace(&mut m[base + j], zero.clone());
                m[base + j] = cur - v[i].clone() * w[j].clone() - w[i].clone() * v[j].clone();
            }
        }
        off.push(alpha);
    }
    if n >= 2 {
        off.push(m[(n - 1) * n + n - 2].clone());
    }
    let diag = (0..n).map(|i| m[i * n + i].clone()).collect();
    Tridiagonal { diag, off }
}

impl<T: Real> Tridiagonal<T> {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: &T, tiny: &T) -> usize {
        let zero = T::zero(x.ctx());
        let mut count = 0;
        let mut d = self.diag[0].clone() - x.clone();
        for i in 0..self.dim() {
            if i > 0 {
                let b = self.off[i - 1].clone();
                d = self.diag[i].clone() - x.clone() - b.clone() * b / d;
            }
            if d.is_zero() {
                d = -tiny.clone();
            }
            if d < zero {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (T, T) {
        let n = self.dim();
        let mut lo: Option<T> = None;
        let mut hi: Option<T> = None;
        for i in 0..n {
            let mut r = T::zero(self.diag[0].ctx());
            if i > 0 {
                r = r + self.off[i - 1].abs();
            }
            if i + 1 < n {
                r = r + self.off[i].abs();
            }
            let a = self.diag[i].clone() - r.clone();
            let b = self.diag[i].clone() + r;
            lo = Some(match lo {
                Some(l) if l <= a => l,
                _ => a,
            });
            hi = Some(match hi {
                Some(h) if h >= b => h,
                _ => b,
            });
        }
        (lo.expect("non-empty"), hi.expect("non-empty"))
    }

    /// The `k`-th smallest eigenvalue (`k` from 1) to relative width `rel_tol`.
    pub fn kth_eigenvalue(&self, k: usize, rel_tol: &T) -> T {
        assert!(k >= 1 && k <= self.dim());
        let ctx = self.diag[0].ctx();
        let (mut lo, mut hi) = self.gershgorin();
        let scale = if lo.abs() > hi.abs() { lo.abs() } else { hi.abs() };
        let tiny = scale.clone() * rel_tol.clone() * rel_tol.clone();
        let half = T::from_f64(0.5, ctx);
        // Absolute floor keeps the loop finite for eigenvalues at zero.
        let floor = scale * rel_tol.clone() * rel_tol.clone();
        for _ in 0..100_000 {
            let width = hi.clone() - lo.clone();
            let mag = if lo.abs() > hi.abs() { lo.abs() } else { hi.abs() };
            let mag_lo = if lo.abs() < hi.abs() { lo.abs() } else { hi.abs() };
            let straddles = lo < T::zero(ctx) && hi > T::zero(ctx);
            let target = if straddles { floor.clone() } else { rel_tol.clone() * mag_lo };
            if width <= target || width <= floor || width.is_zero() || mag.is_zero() {
                break;
            }
            let mid = (lo.clone() + hi.clone()) * half.clone();
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(&mid, &tiny) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) * half
    }

    pub fn max_eigenvalue(&self, rel_tol: &T) -> T {
        self.kth_eigenvalue(self.dim(), rel_tol)
    }

    pub fn min_eigenvalue(&self, rel_tol: &T) -> T {
        self.kth_eigenvalue(1, rel_tol)
    }
}

/// Relative bisection tolerance: `2^{-bits/2}` for big floats, a few ulps for `f64`.
pub fn default_tolerance<T: Real>(ctx: T::Ctx) -> T {
    match T::backend(ctx) {
        Backend::BigFloat { bits } => {
            let denom = UBig::ONE << (bits / 2);
            T::from_rational(&Rational::from_parts(IBig::ONE, denom), ctx)
        }
        _ => T::from_f64(4.0 * f64::EPSILON, ctx),
    }
}

/// Largest eigenvalue of a symmetric matrix.
pub fn lambda_max<T: Real>(a: &Matrix<T>) -> T {
    let ctx = a[(0, 0)].ctx();
    tridiagonalize(a).max_eigenvalue(&default_tolerance::<T>(ctx))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn lambda_min<T: Real>(a: &Matrix<T>) -> T {
    let ctx = a[(0, 0)].ctx();
    tridiagonalize(a).min_eigenvalue(&default_tolerance::<T>(ctx))
}
