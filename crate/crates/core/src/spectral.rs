//! Eigenvalue profiles of Hankel truncations and the finite `ξ(t)` identities.

use serde::{Deserialize, Serialize};

use crate::eigen::lambda_max;
use crate::error::{Error, Result};
use crate::hankel::HankelMatrix;
use crate::matrix::Matrix;
use crate::moments::{MomentFamily, MomentSequence};
use crate::orthopoly::{factor, TriangularPair};
use crate::precision::{rungs, PrecisionPolicy, Rung, LADDER_AGREEMENT};
use crate::scalar::{max_abs, norm_sq, BigFloat, Real};

/// Relative slack allowed by the monotonicity postconditions.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;
pub const PLATEAU_WINDOW: usize = 4;
pub const PLATEAU_THRESHOLD: f64 = 0.5;

/// Which spectral extremes to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremes {
    Both,
    /// `λ_max` only. It is well conditioned, so machine floats are used
    /// whenever the family's moments fit, at any dimension.
    MaxOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfilePoint {
    pub n: usize,
    pub lambda_min: Option<BigFloat>,
    pub lambda_max: BigFloat,
    /// Frobenius norm of `B_N`.
    pub hs_norm_b: Option<BigFloat>,
    /// `Σ_{k<N} m_{2k}`.
    pub trace_partial: BigFloat,
    pub precision_bits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityViolation {
    pub quantity: &'static str,
    pub n_prev: usize,
    pub n_next: usize,
    pub prev: String,
    pub next: String,
}

#[derive(Clone, Debug)]
pub struct SpectralProfile {
    pub entries: Vec<(usize, Result<ProfilePoint>)>,
    pub violations: Vec<MonotonicityViolation>,
}

fn rel_diff(a: &BigFloat, b: &BigFloat) -> f64 {
    let bits = a.precision().min(b.precision()).max(64);
    let a = a.to_bigfloat(bits);
    let b = b.to_bigfloat(bits);
    let scale = if a.abs() > b.abs() { a.abs() } else { b.abs() };
    if scale.is_zero() {
        return 0.0;
    }
    ((a - b).abs() / scale).to_f64().value()
}

struct RungValues {
    lambda_min: Option<BigFloat>,
    lambda_max: BigFloat,
    hs_norm_b: Option<BigFloat>,
    trace_partial: BigFloat,
}

fn values_at<T: Real>(family: &MomentFamily, n: usize, ctx: T::Ctx, extremes: Extremes, bits: usize) -> Result<RungValues> {
    let ms = MomentSequence::<T>::new(family.clone(), ctx)?;
    let h = HankelMatrix::build(&ms, n)?.to_dense();
    let trace = (0..n).fold(T::zero(ctx), |acc, i| acc + h[(i, i)].clone());
    let big = |x: &T| x.to_bigfloat(bits);
    let lmax = lambda_max(&h);
    let (lmin, hs) = match extremes {
        Extremes::MaxOnly => (None, None),
        Extremes::Both => {
            let tp = TriangularPair::from_symmetric(&h)?;
            // λ_min(H) = 1/λ_max(H⁻¹) keeps relative accuracy on graded matrices.
            let inv_max = lambda_max(&tp.a_matrix());
            let lmin = T::one(ctx) / inv_max;
            let hs = tp.hs_norm_sq_b().sqrt().expect("non-negative");
            (Some(big(&lmin)), Some(big(&hs)))
        }
    };
    Ok(RungValues {
        lambda_min: lmin,
        lambda_max: big(&lmax),
        hs_norm_b: hs,
        trace_partial: big(&trace),
    })
}

fn values_at_rung(family: &MomentFamily, n: usize, rung: Rung, extremes: Extremes) -> Result<RungValues> {
    match rung {
        Rung::Machine => values_at::<f64>(family, n, (), extremes, rung.bits()),
        Rung::Bits(b) => values_at::<BigFloat>(family, n, b, extremes, b),
    }
}

fn agree(a: &RungValues, b: &RungValues) -> bool {
    let min_ok = match (&a.lambda_min, &b.lambda_min) {
        (Some(x), Some(y)) => rel_diff(x, y) < LADDER_AGREEMENT,
        _ => true,
    };
    min_ok && rel_diff(&a.lambda_max, &b.lambda_max) < LADDER_AGREEMENT
}

fn point(n: usize, v: RungValues, rung: Rung) -> ProfilePoint {
    ProfilePoint {
        n,
        lambda_min: v.lambda_min,
        lambda_max: v.lambda_max,
        hs_norm_b: v.hs_norm_b,
        trace_partial: v.trace_partial,
        precision_bits: rung.bits(),
    }
}

/// Spectral data of one truncation. Under the ladder policy a rung is accepted
/// once the next rung reproduces its eigenvalues to [`LADDER_AGREEMENT`].
pub fn profile_point(family: &MomentFamily, n: usize, policy: PrecisionPolicy, extremes: Extremes) -> Result<ProfilePoint> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let machine_ok = family.machine_dimension_limit().map_or(true, |l| n <= l);
    let single = match (policy, extremes) {
        (PrecisionPolicy::Ladder, Extremes::MaxOnly) if machine_ok => Some(Rung::Machine),
        (PrecisionPolicy::Ladder, _) => None,
        _ => Some(rungs(policy, family, n)[0]),
    };
    if let Some(rung) = single {
        return values_at_rung(family, n, rung, extremes).map(|v| point(n, v, rung));
    }
    let ladder = rungs(policy, family, n);
    let mut prev: Option<(Rung, RungValues)> = None;
    let mut top = 0;
    for rung in ladder {
        top = rung.bits();
        match values_at_rung(family, n, rung, extremes) {
            Ok(v) => {
                if let Some((r, pv)) = prev.take() {
                    if agree(&pv, &v) {
                        return Ok(point(n, pv, r));
                    }
                }
                prev = Some((rung, v));
            }
            Err(Error::Positivity { .. }) | Err(Error::Precision { .. }) => prev = None,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PrecisionExhausted { dimension: n, bits: top })
}

impl SpectralProfile {
    /// Assembles per-dimension results (in grid order) and runs the monotonicity postconditions.
    pub fn from_entries(entries: Vec<(usize, Result<ProfilePoint>)>) -> Self {
        let ok: Vec<&ProfilePoint> = entries.iter().filter_map(|(_, r)| r.as_ref().ok()).collect();
        let mut violations = Vec::new();
        let tol = 1.0 + MONOTONE_TOLERANCE;
        for w in ok.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut flag = |quantity, prev: &BigFloat, next: &BigFloat, increasing: bool| {
                let (p, q) = (prev.to_bigfloat(64), next.to_bigfloat(64));
                let tol_p = p.clone() * BigFloat::from_f64(tol, 64);
                let tol_p_low = p.clone() / BigFloat::from_f64(tol, 64);
                let bad = if increasing { q < tol_p_low } else { q > tol_p };
                if bad {
                    violations.push(MonotonicityViolation {
                        quantity,
                        n_prev: a.n,
                        n_next: b.n,
                        prev: prev.to_text(),
                        next: next.to_text(),
                    });
                }
            };
            if b.n <= a.n {
                continue;
            }
            flag("lambda_max", &a.lambda_max, &b.lambda_max, true);
            if let (Some(p), Some(q)) = (&a.lambda_min, &b.lambda_min) {
                flag("lambda_min", p, q, false);
            }
            if let (Some(p), Some(q)) = (&a.hs_norm_b, &b.hs_norm_b) {
                flag("hs_norm_b", p, q, true);
            }
        }
        Self { entries, violations }
    }

    pub fn points(&self) -> impl Iterator<Item = &ProfilePoint> {
        self.entries.iter().filter_map(|(_, r)| r.as_ref().ok())
    }

    pub fn errors(&self) -> impl Iterator<Item = (usize, &Error)> {
        self.entries.iter().filter_map(|(n, r)| r.as_ref().err().map(|e| (*n, e)))
    }
}

/// Serial profile over `grid`. Callers wanting parallelism can map
/// [`profile_point`] themselves and use [`SpectralProfile::from_entries`].
pub fn lambda_profile(family: &MomentFamily, grid: &[usize], policy: PrecisionPolicy, extremes: Extremes) -> SpectralProfile {
    SpectralProfile::from_entries(
        grid.iter()
            .map(|&n| (n, profile_point(family, n, policy, extremes)))
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlateauKind {
    DeterminateLike,
    IndeterminateLike,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlateauVerdict {
    pub verdict: PlateauKind,
    /// `λ_min(N_last) / λ_min(N_first)`.
    pub ratio: Option<f64>,
    pub n_first: Option<usize>,
    pub n_last: Option<usize>,
    /// Measured in grid points.
    pub window: usize,
    pub threshold: f64,
}

/// Plateau test on values listed in grid order.
pub fn plateau_verdict_values(ns: &[usize], values: &[f64], window: usize, threshold: f64) -> PlateauVerdict {
    let mut v = PlateauVerdict {
        verdict: PlateauKind::Inconclusive,
        ratio: None,
        n_first: None,
        n_last: None,
        window,
        threshold,
    };
    if window == 0 || values.len() < window + 1 || values.len() != ns.len() {
        return v;
    }
    let last = values.len() - 1;
    let first = last - window;
    let ratio = values[last] / values[first];
    v.n_first = Some(ns[first]);
    v.n_last = Some(ns[last]);
    if !ratio.is_finite() {
        return v;
    }
    v.ratio = Some(ratio);
    v.verdict = if ratio > threshold {
        PlateauKind::IndeterminateLike
    } else {
        PlateauKind::DeterminateLike
    };
    v
}

/// Indeterminate-like when `λ_min` keeps more than `threshold` of its value
/// over the last `window` grid points.
pub fn plateau_verdict(profile: &SpectralProfile, window: usize, threshold: f64) -> PlateauVerdict {
    let (ns, vals): (Vec<usize>, Vec<f64>) = profile
        .points()
        .filter_map(|p| p.lambda_min.as_ref().map(|l| (p.n, l.to_f64().value())))
        .unzip();
    plateau_verdict_values(&ns, &vals, window, threshold)
}

/// `ξ(t) = B_N (P_k(t))_k` together with the check `C ξ = p(t)`.
#[derive(Clone, Debug)]
pub struct XiVector<T> {
    pub t: T,
    pub xi: Vec<T>,
    /// Monic values `Q_k(t)`.
    pub monic: Vec<T>,
    /// Orthonormal values `P_k(t)` when square roots are representable.
    pub p: Option<Vec<T>>,
    /// `max |U ξ - D⁻¹ Q(t)|`, the square-root-free form of `C ξ - p(t)`.
    pub c_xi_residual: T,
    /// `|t| ≥ 1`: computed anyway, outside the range where `ξ(t)` lies in `ℓ²`.
    pub outside_unit_interval: bool,
}

pub fn xi_vector<T: Real>(tp: &TriangularPair<T>, t: &T) -> XiVector<T> {
    let ctx = t.ctx();
    let xi = tp.xi(t);
    let monic = tp.monic_values(t);
    let u_xi = tp.unit().mul_vec(&xi);
    let diffs: Vec<T> = u_xi
        .into_iter()
        .zip(&monic)
        .zip(tp.pivots())
        .map(|((a, q), d)| a - q.clone() / d.clone())
        .collect();
    XiVector {
        t: t.clone(),
        p: tp.eval_polys(t).ok(),
        c_xi_residual: max_abs(&diffs, ctx),
        outside_unit_interval: t.abs() >= T::one(ctx),
        xi,
        monic,
    }
}

#[derive(Clone, Debug)]
pub struct HXiReport<T> {
    /// `CᵗC ξ(t) - (tⁿ)_{n<N}`.
    pub residuals: Vec<T>,
    pub max_abs: T,
    pub norm_sq: T,
}

/// Residual of `H ξ(t) = (tⁿ)` with `H` applied as `Uᵗ D U`.
pub fn h_xi_identity<T: Real>(tp: &TriangularPair<T>, t: &T) -> HXiReport<T> {
    let ctx = t.ctx();
    let xi = tp.xi(t);
    let u_xi = tp.unit().mul_vec(&xi);
    let d_u_xi: Vec<T> = u_xi.into_iter().zip(tp.pivots()).map(|(a, d)| a * d.clone()).collect();
    let h_xi = tp.unit().transpose().mul_vec(&d_u_xi);
    let mut power = T::one(ctx);
    let residuals: Vec<T> = h_xi
        .into_iter()
        .map(|v| {
            let r = v - power.clone();
            power = power.clone() * t.clone();
            r
        })
        .collect();
    HXiReport {
        max_abs: max_abs(&residuals, ctx),
        norm_sq: norm_sq(&residuals, ctx),
        residuals,
    }
}

/// `|Σ_k ξ_k(t) xᵏ - Σ_k P_k(t) P_k(x)|` at each sample `x`.
pub fn kernel_agreement<T: Real>(tp: &TriangularPair<T>, t: &T, xs: &[T]) -> Vec<T> {
    let xi = tp.xi(t);
    xs.iter()
        .map(|x| {
            // Horner on ξ.
            let series = xi
                .iter()
                .rev()
                .fold(T::zero(x.ctx()), |acc, c| acc * x.clone() + c.clone());
            (series - tp.kernel(t, x)).abs()
        })
        .collect()
}

pub const A_MATRIX_LABEL: &str =
    "EXPERIMENT: whether A·H equals the identity is known to hold for some indeterminate problems but not all; no pass/fail";

#[derive(Clone, Debug)]
pub struct AMatrixReport<T> {
    pub dimension: usize,
    /// `max |A_N H_N - I|` with `A_N = B_N B_Nᵗ`.
    pub deviation: T,
    /// `(M, max |A^{(M)}_{N×N} H_N - I|)` where `A^{(M)} = B_M B_Mᵗ`.
    pub inner: Vec<(usize, T)>,
    pub label: &'static str,
}

pub fn a_matrix_experiment<T: Real>(tp: &TriangularPair<T>, ms: &MomentSequence<T>, inner_dims: &[usize]) -> Result<AMatrixReport<T>> {
    let n = tp.dim();
    let ctx = ms.ctx();
    let h = HankelMatrix::build(ms, n)?.to_dense();
    let id = Matrix::identity(n, ctx);
    let deviation = tp.a_matrix().matmul(&h).max_abs_diff(&id);
    let mut inner = Vec::new();
    for &m in inner_dims {
        if m < n {
            return Err(Error::Precondition(format!("inner dimension {m} below N = {n}")));
        }
        let a = factor(ms, m)?.a_matrix().block(n, n);
        inner.push((m, a.matmul(&h).max_abs_diff(&id)));
    }
    Ok(AMatrixReport {
        dimension: n,
        deviation,
        inner,
        label: A_MATRIX_LABEL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational_ratio, Rational};

    #[test]
    fn hilbert_two() {
        let p = profile_point(&MomentFamily::hilbert(), 2, PrecisionPolicy::Ladder, Extremes::Both).unwrap();
        let s = 13f64.sqrt();
        assert!((p.lambda_max.to_f64().value() - (4.0 + s) / 6.0).abs() < 1e-14);
        assert!((p.lambda_min.as_ref().unwrap().to_f64().value() - (4.0 - s) / 6.0).abs() < 1e-14);
    }

    #[test]
    fn ladder_moves_past_machine_for_hilbert_twelve() {
        let p = profile_point(&MomentFamily::hilbert(), 12, PrecisionPolicy::Ladder, Extremes::Both).unwrap();
        assert!(p.precision_bits > 53);
        // λ_min of the 12x12 Hilbert matrix.
        let lmin = p.lambda_min.unwrap().to_f64().value();
        assert!((lmin / 1.047_946_397_962_226_7e-16 - 1.0).abs() < 1e-9, "{lmin}");
    }

    #[test]
    fn plateau_trivial_cases() {
        let ns: Vec<usize> = (0..6).collect();
        let flat = plateau_verdict_values(&ns, &[1.0; 6], 4, 0.5);
        assert_eq!(flat.verdict, PlateauKind::IndeterminateLike);
        assert_eq!(flat.ratio, Some(1.0));
        let geo: Vec<f64> = (0..6).map(|k| 0.1f64.powi(k)).collect();
        assert_eq!(plateau_verdict_values(&ns, &geo, 4, 0.5).verdict, PlateauKind::DeterminateLike);
        assert_eq!(plateau_verdict_values(&ns[..3], &geo[..3], 4, 0.5).verdict, PlateauKind::Inconclusive);
    }

    #[test]
    fn xi_identities_exact() {
        let ms = MomentSequence::<Rational>::new(MomentFamily::uniform(), ()).unwrap();
        let tp = factor(&ms, 6).unwrap();
        for t in [Rational::ZERO, rational_ratio(1, 2)] {
            let xi = xi_vector(&tp, &t);
            assert_eq!(xi.c_xi_residual, Rational::ZERO);
            assert!(xi.p.is_none());
            assert_eq!(h_xi_identity(&tp, &t).max_abs, Rational::ZERO);
            let dev = kernel_agreement(&tp, &t, &[rational_ratio(1, 3), rational_ratio(-3, 4)]);
            assert!(dev.iter().all(|d| *d == Rational::ZERO));
        }
    }

    #[test]
    fn a_matrix_dimension_one() {
        let ms = MomentSequence::<Rational>::new(MomentFamily::hilbert(), ()).unwrap();
        let tp = factor(&ms, 1).unwrap();
        let rep = a_matrix_experiment(&tp, &ms, &[3]).unwrap();
        assert_eq!(rep.deviation, Rational::ZERO);
        assert_eq!(rep.inner.len(), 1);
    }
}
