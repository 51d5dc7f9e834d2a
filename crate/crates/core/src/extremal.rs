//! Point-mass removal on finitely supported measures.
//!
//! Removing a mass `c` at `x ∈ (-1, 1)` changes the Hankel matrix by the
//! rank-one term `(1-x²)⁻¹ c v vᵗ` with `v = √(1-x²) (1, x, x², ...)`. On a
//! finite measure this and the kernel identities are exact statements, which
//! is what the checks here verify.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hankel::HankelMatrix;
use crate::matrix::Matrix;
use crate::moments::{MomentFamily, MomentSequence};
use crate::orthopoly::TriangularPair;
use crate::scalar::{format_rational, max_abs, norm_sq, powi, Rational, Real};

/// Label attached to every report produced here.
pub const FINITE_SURROGATE_BANNER: &str =
    "finite surrogate: finitely supported measure, identities checked exactly in finite dimensions";

/// `Σ_i c_i δ_{x_i}` with strictly increasing points and positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<Rational>,
    weights: Vec<Rational>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    points: Vec<Value>,
    weights: Vec<Value>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Rational>, weights: Vec<Rational>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMeasure(
                "points must be strictly increasing".into(),
            ));
        }
        if let Some(w) = weights.iter().find(|w| **w <= Rational::ZERO) {
            return Err(Error::InvalidMeasure(format!(
                "weights must be positive, got {}",
                format_rational(w)
            )));
        }
        Ok(Self { points, weights })
    }

    /// Builds from unsorted `(point, weight)` pairs.
    pub fn from_pairs(mut pairs: Vec<(Rational, Rational)>) -> Result<Self> {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let (points, weights) = pairs.into_iter().unzip();
        Self::new(points, weights)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn total_mass(&self) -> Rational {
        self.weights.iter().fold(Rational::ZERO, |a, w| a + w)
    }

    pub fn max_abs_point(&self) -> Rational {
        let a = self.points[0].clone();
        let b = self.points[self.len() - 1].clone();
        let a = if a < Rational::ZERO { -a } else { a };
        let b = if b < Rational::ZERO { -b } else { b };
        if a > b {
            a
        } else {
            b
        }
    }

    /// Invariant under `x ↦ -x`.
    pub fn is_symmetric(&self) -> bool {
        let m = self.len();
        (0..m).all(|i| self.points[i] == -self.points[m - 1 - i].clone() && self.weights[i] == self.weights[m - 1 - i])
    }

    /// `m_n = Σ c_i x_iⁿ`.
    pub fn moment<T: Real>(&self, n: usize, ctx: T::Ctx) -> T {
        self.points
            .iter()
            .zip(&self.weights)
            .fold(T::zero(ctx), |acc, (x, c)| {
                acc + T::from_rational(c, ctx) * powi(&T::from_rational(x, ctx), n)
            })
    }

    /// Adds point masses, merging weights at existing points.
    pub fn add_masses(&self, points: &[Rational], weights: &[Rational]) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidMeasure("points and weights differ in length".into()));
        }
        let mut pairs: Vec<(Rational, Rational)> =
            self.points.iter().cloned().zip(self.weights.iter().cloned()).collect();
        for (x, c) in points.iter().zip(weights) {
            if *c <= Rational::ZERO {
                return Err(Error::InvalidMeasure("added weights must be positive".into()));
            }
            match pairs.iter_mut().find(|(p, _)| p == x) {
                Some((_, w)) => *w = w.clone() + c,
                None => pairs.push((x.clone(), c.clone())),
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn to_json(&self) -> Value {
        let enc = |v: &[Rational]| Value::Array(v.iter().map(|q| Value::String(format_rational(q))).collect());
        serde_json::json!({ "points": enc(&self.points), "weights": enc(&self.weights) })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: RawMeasure =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let dec = |vals: &[Value]| -> Result<Vec<Rational>> {
            vals.iter().map(|x| <Rational as Real>::from_json(x, ())).collect()
        };
        Self::new(dec(&raw.points)?, dec(&raw.weights)?)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }
}

fn check_indices(mu: &DiscreteMeasure, indices: &[usize]) -> Result<()> {
    for (pos, &i) in indices.iter().enumerate() {
        if i >= mu.len() {
            return Err(Error::InvalidIndex { index: i, len: mu.len() });
        }
        if indices[..pos].contains(&i) {
            return Err(Error::Precondition(format!("index {i} listed twice")));
        }
    }
    Ok(())
}

/// `μ̃ = μ - Σ_j μ({x_j}) δ_{x_j}` over the given indices.
pub fn remove_masses(mu: &DiscreteMeasure, indices: &[usize]) -> Result<DiscreteMeasure> {
    check_indices(mu, indices)?;
    if indices.len() == mu.len() {
        return Err(Error::EmptyMeasure);
    }
    let keep = |i: &usize| !indices.contains(i);
    let points = (0..mu.len()).filter(keep).map(|i| mu.points[i].clone()).collect();
    let weights = (0..mu.len()).filter(keep).map(|i| mu.weights[i].clone()).collect();
    DiscreteMeasure::new(points, weights)
}

/// The removed part `Σ_j μ({x_j}) δ_{x_j}`; `None` when nothing is removed.
pub fn removed_part(mu: &DiscreteMeasure, indices: &[usize]) -> Result<Option<DiscreteMeasure>> {
    check_indices(mu, indices)?;
    if indices.is_empty() {
        return Ok(None);
    }
    let pairs = indices
        .iter()
        .map(|&i| (mu.points[i].clone(), mu.weights[i].clone()))
        .collect();
    DiscreteMeasure::from_pairs(pairs).map(Some)
}

fn hankel_of<T: Real>(mu: &DiscreteMeasure, n: usize, ctx: T::Ctx) -> Result<Matrix<T>> {
    let ms = MomentSequence::<T>::new(MomentFamily::Discrete(mu.clone()), ctx)?;
    Ok(HankelMatrix::build(&ms, n)?.to_dense())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemovedMass {
    pub index: usize,
    pub point: String,
    pub weight: String,
}

/// Outcome of [`perturbation_check`].
#[derive(Clone, Debug)]
pub struct PerturbationReport<T> {
    pub dimension: usize,
    pub removed: Vec<RemovedMass>,
    /// `(1-x_j²)⁻¹ c_j` per removed mass.
    pub coefficients: Vec<T>,
    /// `v_{x_j} v_{x_j}ᵗ` truncated to `N × N`, entries `(1-x_j²) x_j^{k+l}`.
    pub projector_blocks: Vec<Matrix<T>>,
    /// `max |H_N(μ) - H_N(μ̃) - Σ_j coefficient_j · block_j|`.
    pub deviation: T,
    /// `‖H̃_N ξ_N(x_j)‖²` per removed mass, present when `N` does not exceed the support size.
    pub kernel_residuals: Option<Vec<T>>,
    /// Number of masses removed; the remaining measure keeps `M - removed_count` points.
    pub removed_count: usize,
    pub banner: &'static str,
}

fn check_hypothesis(mu: &DiscreteMeasure, indices: &[usize]) -> Result<()> {
    for &i in indices {
        let x = &mu.points[i];
        let x2 = x.clone() * x;
        if x2 >= Rational::ONE {
            return Err(Error::HypothesisViolation {
                point: format_rational(x),
            });
        }
    }
    Ok(())
}

/// Verifies `H = H̃ + Σ_j (1-x_j²)⁻¹ μ({x_j}) v_{x_j} v_{x_j}ᵗ` on the `N × N` truncation.
pub fn perturbation_check<T: Real>(
    mu: &DiscreteMeasure,
    indices: &[usize],
    n: usize,
    ctx: T::Ctx,
) -> Result<PerturbationReport<T>> {
    check_indices(mu, indices)?;
    check_hypothesis(mu, indices)?;
    if n == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    let h = hankel_of::<T>(mu, n, ctx)?;
    let h_tilde = tilde_hankel::<T>(mu, indices, n, ctx)?;
    let mut rebuilt = h_tilde;
    let mut coefficients = Vec::new();
    let mut projector_blocks = Vec::new();
    for &i in indices {
        let x = T::from_rational(&mu.points[i], ctx);
        let one_minus = T::one(ctx) - x.clone() * x.clone();
        let coef = T::from_rational(&mu.weights[i], ctx) / one_minus.clone();
        let pw: Vec<T> = (0..2 * n - 1).map(|p| powi(&x, p)).collect();
        let block = Matrix::from_fn(n, n, |k, l| one_minus.clone() * pw[k + l].clone());
        for k in 0..n {
            for l in 0..n {
                let cur = rebuilt[(k, l)].clone();
                rebuilt[(k, l)] = cur + coef.clone() * block[(k, l)].clone();
            }
        }
        coefficients.push(coef);
        projector_blocks.push(block);
    }
    let deviation = h.max_abs_diff(&rebuilt);
    let kernel_residuals = if n <= mu.len() {
        Some(
            kernel_vector_check::<T>(mu, indices, n, ctx)?
                .into_iter()
                .map(|r| r.residual_norm_sq)
                .collect(),
        )
    } else {
        None
    };
    Ok(PerturbationReport {
        dimension: n,
        removed: indices
            .iter()
            .map(|&i| RemovedMass {
                index: i,
                point: format_rational(&mu.points[i]),
                weight: format_rational(&mu.weights[i]),
            })
            .collect(),
        coefficients,
        projector_blocks,
        deviation,
        kernel_residuals,
        removed_count: indices.len(),
        banner: FINITE_SURROGATE_BANNER,
    })
}

/// `H_N(μ̃)`; the zero matrix when every mass is removed.
fn tilde_hankel<T: Real>(mu: &DiscreteMeasure, indices: &[usize], n: usize, ctx: T::Ctx) -> Result<Matrix<T>> {
    if indices.len() == mu.len() {
        Ok(Matrix::zeros(n, n, ctx))
    } else {
        hankel_of::<T>(&remove_masses(mu, indices)?, n, ctx)
    }
}

/// Orthonormal system of `μ` up to degree `M - 1`.
pub fn orthonormal_system<T: Real>(mu: &DiscreteMeasure, ctx: T::Ctx) -> Result<TriangularPair<T>> {
    TriangularPair::from_symmetric(&hankel_of::<T>(mu, mu.len(), ctx)?)
}

/// `K(x, y) = Σ_{k<M} P_k(x) P_k(y)` for the orthonormal polynomials of `μ`.
pub fn cd_kernel<T: Real>(mu: &DiscreteMeasure, x: &T, y: &T) -> Result<T> {
    Ok(orthonormal_system::<T>(mu, x.ctx())?.kernel(x, y))
}

#[derive(Clone, Debug)]
pub struct KernelResidual<T> {
    pub index: usize,
    /// `ξ_N(x_j) = B_N (P_k(x_j))_{k<N}`.
    pub xi: Vec<T>,
    /// `H̃_N ξ_N(x_j)`.
    pub residual: Vec<T>,
    pub residual_norm_sq: T,
    pub residual_max_abs: T,
}

/// Applies `H̃_N` to `ξ_N(x_j)` for each removed point, the polynomials
/// coming from `μ` itself. Requires `N ≤ M` so the truncation is invertible.
pub fn kernel_vector_check<T: Real>(
    mu: &DiscreteMeasure,
    indices: &[usize],
    n: usize,
    ctx: T::Ctx,
) -> Result<Vec<KernelResidual<T>>> {
    check_indices(mu, indices)?;
    check_hypothesis(mu, indices)?;
    if n == 0 || n > mu.len() {
        return Err(Error::Precondition(format!(
            "kernel check needs 1 <= N <= {} (support size), got {n}",
            mu.len()
        )));
    }
    let tp = TriangularPair::from_symmetric(&hankel_of::<T>(mu, n, ctx)?)?;
    let h_tilde = tilde_hankel::<T>(mu, indices, n, ctx)?;
    Ok(indices
        .iter()
        .map(|&i| {
            let xi = tp.xi(&T::from_rational(&mu.points[i], ctx));
            let residual = h_tilde.mul_vec(&xi);
            KernelResidual {
                index: i,
                residual_norm_sq: norm_sq(&residual, ctx),
                residual_max_abs: max_abs(&residual, ctx),
                xi,
                residual,
            }
        })
        .collect())
}

/// Coefficients of `q(x) Π_j (x - x_j)`, which vanishes at every removed point.
pub fn annihilating_vector(mu: &DiscreteMeasure, indices: &[usize], q: &[Rational]) -> Result<Vec<Rational>> {
    check_indices(mu, indices)?;
    let mut poly = q.to_vec();
    for &i in indices {
        let x = &mu.points[i];
        let mut next = vec![Rational::ZERO; poly.len() + 1];
        for (k, a) in poly.iter().enumerate() {
            next[k + 1] = next[k + 1].clone() + a;
            next[k] = next[k].clone() - a.clone() * x;
        }
        poly = next;
    }
    Ok(poly)
}

/// `gᵗ H_N g` with `N = len(g)`.
pub fn form_value<T: Real>(mu: &DiscreteMeasure, g: &[T], ctx: T::Ctx) -> Result<T> {
    if g.is_empty() {
        return Ok(T::zero(ctx));
    }
    let ms = MomentSequence::<T>::new(MomentFamily::Discrete(mu.clone()), ctx)?;
    Ok(HankelMatrix::build(&ms, g.len())?.quadratic_form(g))
}
