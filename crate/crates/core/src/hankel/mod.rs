//! Truncated Hankel matrices `(m_{k+l})`, shift operators and matrix-vector
//! products.
//!
//! An operator is always represented by the pair (moment sequence, dimension);
//! nothing here stands in for the infinite matrix.

mod domain;
mod fft;
mod series;

pub use domain::{
    domain_diagnostic, fit_log_slope, CoefficientGenerator, DomainOptions, DomainVerdict, Trend,
    TrendEvidence, BOUNDED_SLOPE, DIVERGENT_SLOPE,
};
pub use fft::{hankel_correlate, matvec_fft};
pub use series::{apply_h_via_series, SeriesApplyReport, SeriesOptions, SERIES_MAX_TERMS, SERIES_TOL};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::moments::MomentSequence;
use crate::scalar::{Backend, Real};

/// `N x N` truncation stored through its `2N - 1` distinct entries.
#[derive(Clone, Debug, PartialEq)]
pub struct HankelMatrix<T> {
    dim: usize,
    moments: Vec<T>,
}

impl<T: Real> HankelMatrix<T> {
    /// Builds the truncation `(m_{k+l})_{0 ≤ k,l < N}`.
    pub fn build(ms: &MomentSequence<T>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("Hankel dimension must be at least 1".into()));
        }
        if ms.backend() == Backend::F64 {
            if let Some(limit) = ms.family().and_then(|f| f.machine_dimension_limit()) {
                if dim > limit {
                    return Err(Error::Precision {
                        message: format!(
                            "{} truncation of dimension {dim} exceeds machine range (limit {limit})",
                            ms.family().map(|f| f.name()).unwrap_or("derived")
                        ),
                        required: "bigfloat:<bits>".into(),
                    });
                }
            }
        }
        let moments = ms.moments(2 * dim - 1)?;
        Ok(Self { dim, moments })
    }

    /// Wraps `2N - 1` moments directly.
    pub fn from_moments(moments: Vec<T>) -> Result<Self> {
        if moments.len() % 2 == 0 {
            return Err(Error::Domain(format!(
                "a Hankel truncation needs an odd number of moments, got {}",
                moments.len()
            )));
        }
        Ok(Self {
            dim: moments.len().div_ceil(2),
            moments,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, k: usize, l: usize) -> &T {
        assert!(k < self.dim && l < self.dim);
        &self.moments[k + l]
    }

    /// `m_0 .. m_{2N-2}`.
    pub fn moments(&self) -> &[T] {
        &self.moments
    }

    pub fn to_dense(&self) -> Matrix<T> {
        Matrix::from_fn(self.dim, self.dim, |k, l| self.moments[k + l].clone())
    }

    /// `gᵗ H g` for `len(g) ≤ N`.
    pub fn quadratic_form(&self, g: &[T]) -> T {
        let ctx = self.moments[0].ctx();
        let u = correlate(&self.moments, g, g.len());
        u.into_iter()
            .zip(g)
            .fold(T::zero(ctx), |acc, (a, b)| acc + a * b.clone())
    }
}

/// `u_n = Σ_k m_{n+k} g_k` for `n < out`, exact row action.
fn correlate<T: Real>(moments: &[T], g: &[T], out: usize) -> Vec<T> {
    let ctx = moments[0].ctx();
    (0..out)
        .map(|n| {
            g.iter().enumerate().fold(T::zero(ctx), |acc, (k, gk)| {
                if gk.is_zero() {
                    acc
                } else {
                    acc + moments[n + k].clone() * gk.clone()
                }
            })
        })
        .collect()
}

/// `((Σ_{k<N} m_{n+k} g_k))_{n<N}`; exact under the rational backend.
pub fn matvec_naive<T: Real>(ms: &MomentSequence<T>, g: &[T], dim: usize) -> Result<Vec<T>> {
    check_len(g, dim)?;
    if dim == 0 {
        return Ok(Vec::new());
    }
    let moments = ms.moments(2 * dim - 1)?;
    Ok(correlate(&moments, g, dim))
}

fn check_len<T>(g: &[T], dim: usize) -> Result<()> {
    if g.len() > dim {
        return Err(Error::Domain(format!(
            "vector of length {} exceeds dimension {dim}",
            g.len()
        )));
    }
    Ok(())
}

/// `(Sᵖ g)_k = g_{k+p}`.
pub fn shift<T: Real>(g: &[T], p: usize) -> Vec<T> {
    g.iter().skip(p).cloned().collect()
}

/// `(S*ᵖ g)_k = g_{k-p}` for `k ≥ p`, zero otherwise.
pub fn shift_adjoint<T: Real>(g: &[T], p: usize) -> Vec<T> {
    let Some(first) = g.first() else {
        return Vec::new();
    };
    let zero = T::zero(first.ctx());
    std::iter::repeat(zero).take(p).chain(g.iter().cloned()).collect()
}

/// Unit vector `e_k` of length `len`.
pub fn unit_vector<T: Real>(k: usize, len: usize, ctx: T::Ctx) -> Vec<T> {
    (0..len)
        .map(|i| if i == k { T::one(ctx) } else { T::zero(ctx) })
        .collect()
}

/// `v_k = e_k - e_{k+2}`.
pub fn v_vector<T: Real>(k: usize, ctx: T::Ctx) -> Vec<T> {
    let mut v = unit_vector::<T>(k, k + 3, ctx);
    v[k + 2] = -T::one(ctx);
    v
}
