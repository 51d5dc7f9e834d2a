//! Orthonormal polynomials from the Hankel matrix.
//!
//! The factorization is kept square-root free: `H = Uᵗ D U` with `U` unit
//! upper triangular. Then `C = D^{1/2} U`, `B = C⁻¹ = U⁻¹ D^{-1/2}`, the monic
//! orthogonal polynomials are `Q_n(x) = Σ_k (U⁻¹)_{k,n} xᵏ` and
//! `P_n = Q_n / √d_n`. Every identity that avoids the square roots stays exact
//! under the rational backend.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hankel::HankelMatrix;
use crate::linalg::{ldl_upper, unit_upper_inverse};
use crate::matrix::{vec_from_json, vec_to_json, Matrix};
use crate::moments::MomentSequence;
use crate::scalar::{max_abs, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct TriangularPair<T> {
    unit: Matrix<T>,
    unit_inv: Matrix<T>,
    pivots: Vec<T>,
}

/// Factors the `n × n` Hankel truncation of `ms`.
pub fn factor<T: Real>(ms: &MomentSequence<T>, n: usize) -> Result<TriangularPair<T>> {
    factor_hankel(&HankelMatrix::build(ms, n)?)
}

pub fn factor_hankel<T: Real>(h: &HankelMatrix<T>) -> Result<TriangularPair<T>> {
    TriangularPair::from_symmetric(&h.to_dense())
}

fn sqrt_or_err<T: Real>(x: &T, what: &str) -> Result<T> {
    x.sqrt().ok_or_else(|| Error::UnsupportedBackend {
        operation: format!("square root of {what} {x:?}"),
        backend: T::backend(x.ctx()).to_string(),
    })
}

impl<T: Real> TriangularPair<T> {
    pub fn from_symmetric(h: &Matrix<T>) -> Result<Self> {
        let ldl = ldl_upper(h)?;
        let unit_inv = unit_upper_inverse(&ldl.unit);
        Ok(Self {
            unit: ldl.unit,
            unit_inv,
            pivots: ldl.pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    fn ctx(&self) -> T::Ctx {
        self.pivots[0].ctx()
    }

    /// `U` in `H = Uᵗ D U`.
    pub fn unit(&self) -> &Matrix<T> {
        &self.unit
    }

    pub fn unit_inv(&self) -> &Matrix<T> {
        &self.unit_inv
    }

    /// `D`, the squared diagonal of `C`.
    pub fn pivots(&self) -> &[T] {
        &self.pivots
    }

    /// `C = D^{1/2} U`, entries `c_{k,n}` at row `k`, column `n`.
    pub fn c_matrix(&self) -> Result<Matrix<T>> {
        let roots = self.pivot_roots()?;
        let n = self.dim();
        Ok(Matrix::from_fn(n, n, |k, j| roots[k].clone() * self.unit[(k, j)].clone()))
    }

    /// `B = U⁻¹ D^{-1/2}`, entries `b_{k,n}`: `P_n(x) = Σ_k b_{k,n} xᵏ`.
    pub fn b_matrix(&self) -> Result<Matrix<T>> {
        let roots = self.pivot_roots()?;
        let n = self.dim();
        Ok(Matrix::from_fn(n, n, |k, j| self.unit_inv[(k, j)].clone() / roots[j].clone()))
    }

    fn pivot_roots(&self) -> Result<Vec<T>> {
        self.pivots.iter().map(|d| sqrt_or_err(d, "pivot")).collect()
    }

    /// `Uᵗ D U`, which equals `CᵗC`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.dim();
        let du = Matrix::from_fn(n, n, |k, j| self.pivots[k].clone() * self.unit[(k, j)].clone());
        self.unit.transpose().matmul(&du)
    }

    /// `max |CᵗC - H|` evaluated without square roots.
    pub fn reconstruction_deviation(&self, h: &Matrix<T>) -> T {
        self.reconstruct().max_abs_diff(h)
    }

    /// `max(|CB - I|, |BC - I|)`; the diagonal scalings cancel, leaving `U U⁻¹` and `U⁻¹ U`.
    pub fn inverse_deviation(&self) -> T {
        let id = Matrix::identity(self.dim(), self.ctx());
        let a = self.unit.matmul(&self.unit_inv).max_abs_diff(&id);
        let b = self.unit_inv.matmul(&self.unit).max_abs_diff(&id);
        if a > b {
            a
        } else {
            b
        }
    }

    /// `A = B Bᵗ = U⁻¹ D⁻¹ U⁻ᵗ`, the inverse of the truncation.
    pub fn a_matrix(&self) -> Matrix<T> {
        let n = self.dim();
        let scaled = Matrix::from_fn(n, n, |k, j| self.unit_inv[(k, j)].clone() / self.pivots[j].clone());
        scaled.matmul(&self.unit_inv.transpose())
    }

    /// Monic orthogonal polynomials `Q_0(x), ..., Q_{N-1}(x)`.
    pub fn monic_values(&self, x: &T) -> Vec<T> {
        let n = self.dim();
        let powers = powers(x, n);
        (0..n)
            .map(|j| {
                (0..=j).fold(T::zero(self.ctx()), |acc, k| {
                    acc + self.unit_inv[(k, j)].clone() * powers[k].clone()
                })
            })
            .collect()
    }

    /// Orthonormal polynomials `P_0(x), ..., P_{N-1}(x)`.
    pub fn eval_polys(&self, x: &T) -> Result<Vec<T>> {
        self.monic_values(x)
            .into_iter()
            .zip(&self.pivots)
            .map(|(q, d)| Ok(q / sqrt_or_err(d, "pivot")?))
            .collect()
    }

    /// `Σ_{k≤n} c_{k,n} P_k(x)` for each `n`, as `Σ_k U_{k,n} Q_k(x)`. Equals `xⁿ`.
    pub fn expand_monomials(&self, x: &T) -> Vec<T> {
        let q = self.monic_values(x);
        let n = self.dim();
        (0..n)
            .map(|j| {
                (0..=j).fold(T::zero(self.ctx()), |acc, k| {
                    acc + self.unit[(k, j)].clone() * q[k].clone()
                })
            })
            .collect()
    }

    /// `max_n |Σ_k c_{k,n} P_k(x) - xⁿ|`.
    pub fn monomial_residual(&self, x: &T) -> T {
        let diffs: Vec<T> = self
            .expand_monomials(x)
            .into_iter()
            .zip(powers(x, self.dim()))
            .map(|(a, b)| a - b)
            .collect();
        max_abs(&diffs, self.ctx())
    }

    /// `‖B‖²_F = Σ_{k,n} (U⁻¹)²_{k,n} / d_n`.
    pub fn hs_norm_sq_b(&self) -> T {
        let n = self.dim();
        let mut total = T::zero(self.ctx());
        for j in 0..n {
            let col = (0..=j).fold(T::zero(self.ctx()), |acc, k| {
                let u = self.unit_inv[(k, j)].clone();
                acc + u.clone() * u
            });
            total = total + col / self.pivots[j].clone();
        }
        total
    }

    /// `ξ(t) = B (P_k(t))_k = U⁻¹ D⁻¹ (Q_k(t))_k`.
    pub fn xi(&self, t: &T) -> Vec<T> {
        let scaled: Vec<T> = self
            .monic_values(t)
            .into_iter()
            .zip(&self.pivots)
            .map(|(q, d)| q / d.clone())
            .collect();
        self.unit_inv.mul_vec(&scaled)
    }

    /// Christoffel–Darboux kernel `Σ_{k<N} P_k(x) P_k(y)`.
    pub fn kernel(&self, x: &T, y: &T) -> T {
        let qx = self.monic_values(x);
        let qy = self.monic_values(y);
        qx.into_iter()
            .zip(qy)
            .zip(&self.pivots)
            .fold(T::zero(self.ctx()), |acc, ((a, b), d)| acc + a * b / d.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dimension": self.dim(),
            "unit": self.unit.to_json(),
            "pivots": vec_to_json(&self.pivots),
        })
    }

    /// Rebuilds a pair from [`Self::to_json`] output, checking the shape.
    pub fn from_json(v: &Value, ctx: T::Ctx) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("triangular pair must be an object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "dimension" | "unit" | "pivots") {
                return Err(Error::Parse(format!("unknown key `{key}`")));
            }
        }
        let get = |k: &str| obj.get(k).ok_or_else(|| Error::Parse(format!("missing `{k}`")));
        let unit = Matrix::<T>::from_json(get("unit")?, ctx)?;
        let pivots = vec_from_json::<T>(get("pivots")?, ctx)?;
        let n = pivots.len();
        if get("dimension")?.as_u64() != Some(n as u64) || unit.rows() != n || unit.cols() != n || n == 0 {
            return Err(Error::Parse("inconsistent triangular pair dimensions".into()));
        }
        let zero = T::zero(ctx);
        for i in 0..n {
            if unit[(i, i)] != T::one(ctx) || (0..i).any(|j| unit[(i, j)] != zero) {
                return Err(Error::Parse("unit factor must be unit upper triangular".into()));
            }
            if !(pivots[i] > zero) {
                return Err(Error::Parse("pivots must be positive".into()));
            }
        }
        let unit_inv = unit_upper_inverse(&unit);
        Ok(Self { unit, unit_inv, pivots })
    }
}

fn powers<T: Real>(x: &T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    let mut p = T::one(x.ctx());
    for _ in 0..n {
        out.push(p.clone());
        p = p * x.clone();
    }
    out
}

/// Partial sums of `P(z)² = Σ_n P_n(z)²`.
#[derive(Clone, Debug)]
pub struct PFunction<T> {
    pub n_max: usize,
    /// `Σ_{n≤n_max} P_n(z)²`, exact under the rational backend.
    pub sum_sq: T,
    /// Square root of `sum_sq` when the backend can represent it.
    pub value: Option<T>,
    /// `P_n(z)²` for `n ≤ n_max`.
    pub increments: Vec<T>,
}

impl<T: Real> PFunction<T> {
    pub fn last_increment(&self) -> &T {
        self.increments.last().expect("at least one term")
    }
}

pub fn p_function<T: Real>(tp: &TriangularPair<T>, z: &T, n_max: usize) -> Result<PFunction<T>> {
    if n_max >= tp.dim() {
        return Err(Error::InvalidIndex {
            index: n_max,
            len: tp.dim(),
        });
    }
    let q = tp.monic_values(z);
    let increments: Vec<T> = q[..=n_max]
        .iter()
        .zip(tp.pivots())
        .map(|(q, d)| q.clone() * q.clone() / d.clone())
        .collect();
    let sum_sq = increments
        .iter()
        .fold(T::zero(z.ctx()), |acc, v| acc + v.clone());
    let value = sum_sq.sqrt();
    Ok(PFunction {
        n_max,
        sum_sq,
        value,
        increments,
    })
}

/// Three-term recurrence `x P_n = β_{n+1} P_{n+1} + α_n P_n + β_n P_{n-1}`.
///
/// `alpha[n] = α_n` for `n ≤ N-2`; `beta_sq[n-1] = β_n²` for `1 ≤ n ≤ N-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceCoeffs<T> {
    pub alpha: Vec<T>,
    pub beta_sq: Vec<T>,
    pub beta: Option<Vec<T>>,
    /// `m_0`, fixing `P_0 = 1/√m_0`.
    pub m0: T,
}

pub fn recurrence<T: Real>(tp: &TriangularPair<T>) -> Result<RecurrenceCoeffs<T>> {
    let n = tp.dim();
    if n < 3 {
        return Err(Error::Precondition(format!(
            "recurrence needs dimension at least 3, got {n}"
        )));
    }
    let ctx = tp.ctx();
    // Subleading coefficient of Q_n.
    let s = |j: usize| {
        if j == 0 {
            T::zero(ctx)
        } else {
            tp.unit_inv[(j - 1, j)].clone()
        }
    };
    let alpha = (0..n - 1).map(|j| s(j) - s(j + 1)).collect();
    let beta_sq: Vec<T> = (1..n)
        .map(|j| tp.pivots[j].clone() / tp.pivots[j - 1].clone())
        .collect();
    let beta = beta_sq.iter().map(|b| b.sqrt()).collect();
    Ok(RecurrenceCoeffs {
        alpha,
        beta_sq,
        beta,
        m0: tp.pivots[0].clone(),
    })
}

impl<T: Real> RecurrenceCoeffs<T> {
    /// Number of polynomials the coefficients determine.
    pub fn len(&self) -> usize {
        self.beta_sq.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Monic `Q_n(x)` from `Q_{n+1} = (x - α_n) Q_n - β_n² Q_{n-1}`.
    pub fn eval_monic(&self, x: &T) -> Vec<T> {
        let ctx = x.ctx();
        let mut out = vec![T::one(ctx)];
        if self.len() > 1 {
            out.push(x.clone() - self.alpha[0].clone());
        }
        for j in 1..self.len() - 1 {
            let next = (x.clone() - self.alpha[j].clone()) * out[j].clone()
                - self.beta_sq[j - 1].clone() * out[j - 1].clone();
            out.push(next);
        }
        out
    }

    /// Orthonormal `P_n(x)` by the recurrence; needs square roots.
    pub fn eval_orthonormal(&self, x: &T) -> Result<Vec<T>> {
        let beta = self.beta.as_ref().ok_or_else(|| Error::UnsupportedBackend {
            operation: "orthonormal recurrence (irrational β)".into(),
            backend: T::backend(x.ctx()).to_string(),
        })?;
        let mut out = vec![T::one(x.ctx()) / sqrt_or_err(&self.m0, "m_0")?];
        if self.len() > 1 {
            out.push((x.clone() - self.alpha[0].clone()) * out[0].clone() / beta[0].clone());
        }
        for j in 1..self.len() - 1 {
            let next = ((x.clone() - self.alpha[j].clone()) * out[j].clone()
                - beta[j - 1].clone() * out[j - 1].clone())
                / beta[j].clone();
            out.push(next);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::MomentFamily;
    use crate::scalar::{rational_ratio, Rational};

    fn uniform(n: usize) -> TriangularPair<Rational> {
        let ms = MomentSequence::<Rational>::new(MomentFamily::uniform(), ()).unwrap();
        factor(&ms, n).unwrap()
    }

    #[test]
    fn uniform_legendre_coefficients() {
        let tp = uniform(3);
        // Q_2 = x² - 1/3, d = (1, 1/3, 4/45).
        assert_eq!(tp.pivots(), &[Rational::ONE, rational_ratio(1, 3), rational_ratio(4, 45)]);
        assert_eq!(tp.unit_inv()[(0, 2)], rational_ratio(-1, 3));
        let tf = {
            let ms = MomentSequence::<f64>::new(MomentFamily::uniform(), ()).unwrap();
            factor(&ms, 3).unwrap()
        };
        let b = tf.b_matrix().unwrap();
        assert!((b[(1, 1)] - 3f64.sqrt()).abs() < 1e-14);
        assert!((b[(2, 2)] - 1.5 * 5f64.sqrt()).abs() < 1e-14);
        assert!((b[(0, 2)] + 5f64.sqrt() / 2.0).abs() < 1e-14);
        let c = tf.c_matrix().unwrap();
        assert!((c[(1, 1)] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((tf.eval_polys(&1.0).unwrap()[1] - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn exact_identities() {
        let tp = uniform(6);
        let ms = MomentSequence::<Rational>::new(MomentFamily::uniform(), ()).unwrap();
        let h = HankelMatrix::build(&ms, 6).unwrap().to_dense();
        assert_eq!(tp.reconstruction_deviation(&h), Rational::ZERO);
        assert_eq!(tp.inverse_deviation(), Rational::ZERO);
        assert_eq!(tp.a_matrix().matmul(&h), Matrix::identity(6, ()));
        for t in [rational_ratio(1, 3), rational_ratio(-2, 7)] {
            assert_eq!(tp.monomial_residual(&t), Rational::ZERO);
        }
    }

    #[test]
    fn dimension_one() {
        let ms = MomentSequence::<f64>::new(MomentFamily::Explicit(vec![Rational::from(4)]), ()).unwrap();
        let tp = factor(&ms, 1).unwrap();
        assert_eq!(tp.c_matrix().unwrap()[(0, 0)], 2.0);
        assert_eq!(tp.b_matrix().unwrap()[(0, 0)], 0.5);
    }

    #[test]
    fn rational_square_roots_are_refused_when_irrational() {
        let tp = uniform(2);
        assert!(matches!(tp.b_matrix(), Err(Error::UnsupportedBackend { .. })));
    }

    #[test]
    fn p_function_uniform_at_zero() {
        let tp = uniform(3);
        let p = p_function(&tp, &Rational::ZERO, 2).unwrap();
        assert_eq!(p.sum_sq, rational_ratio(9, 4));
        assert_eq!(p.value, Some(rational_ratio(3, 2)));
        assert_eq!(p.last_increment(), &rational_ratio(5, 4));
        let p0 = p_function(&tp, &Rational::ZERO, 0).unwrap();
        assert_eq!(p0.value, Some(Rational::ONE));
        assert!(p_function(&tp, &Rational::ZERO, 3).is_err());
    }

    #[test]
    fn recurrence_uniform() {
        let tp = uniform(5);
        let rc = recurrence(&tp).unwrap();
        assert!(rc.alpha.iter().all(|a| *a == Rational::ZERO));
        assert_eq!(rc.beta_sq[0], rational_ratio(1, 3));
        let x = rational_ratio(2, 5);
        assert_eq!(rc.eval_monic(&x), tp.monic_values(&x));
        assert!(recurrence(&uniform(2)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let tp = uniform(4);
        let back = TriangularPair::<Rational>::from_json(&tp.to_json(), ()).unwrap();
        assert_eq!(back, tp);
        let mut bad = tp.to_json();
        bad["extra"] = json!(1);
        assert!(TriangularPair::<Rational>::from_json(&bad, ()).is_err());
    }
}
