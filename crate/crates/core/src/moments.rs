//! Moment families, cached moment sequences and their classification.

use std::sync::RwLock;

use dashu_ratio::RBig;

use crate::error::{Error, Result};
use crate::extremal::DiscreteMeasure;
use crate::hankel::HankelMatrix;
use crate::linalg::ldl_upper_partial;
use crate::scalar::{powi, rational_is_integer, rational_ratio, Backend, Rational, Real};

/// Closed-form or tabulated moment families.
#[derive(Clone, Debug, PartialEq)]
pub enum MomentFamily {
    /// `m_n = 1/(n+1)^c` on `(0, 1)`; `c = 1` gives the Hilbert matrix.
    PowerLog { c: Rational },
    /// Symmetric Gegenbauer weight on `(-1, 1)`:
    /// `m_{2k} = (1/2)_k / (λ+1)_k`, odd moments zero.
    Gegenbauer { lambda: Rational },
    /// Finitely supported measure `Σ c_i δ_{x_i}`.
    Discrete(DiscreteMeasure),
    /// `m_n = exp(n² σ² / 2)`, an indeterminate sequence.
    LogNormal { sigma: Rational },
    /// Standard normal: `m_{2k} = (2k-1)!!`, odd moments zero.
    Gaussian,
    /// Tabulated values `m_0, m_1, ...`.
    Explicit(Vec<Rational>),
}

impl MomentFamily {
    pub fn hilbert() -> Self {
        MomentFamily::PowerLog {
            c: Rational::ONE,
        }
    }

    pub fn uniform() -> Self {
        MomentFamily::Gegenbauer {
            lambda: rational_ratio(1, 2),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MomentFamily::PowerLog { .. } => "power_log",
            MomentFamily::Gegenbauer { .. } => "gegenbauer",
            MomentFamily::Discrete(_) => "discrete",
            MomentFamily::LogNormal { .. } => "log_normal",
            MomentFamily::Gaussian => "gaussian",
            MomentFamily::Explicit(_) => "explicit",
        }
    }

    /// Checks parameter ranges: `c > 0`, `λ > -1/2`, `σ > 0`.
    pub fn validate(&self) -> Result<()> {
        match self {
            MomentFamily::PowerLog { c } if c <= &RBig::ZERO => {
                Err(Error::Domain(format!("power_log requires c > 0, got {c}")))
            }
            MomentFamily::Gegenbauer { lambda } if lambda <= &rational_ratio(-1, 2) => Err(
                Error::Domain(format!("gegenbauer requires lambda > -1/2, got {lambda}")),
            ),
            MomentFamily::LogNormal { sigma } if sigma <= &RBig::ZERO => Err(Error::Domain(
                format!("log_normal requires sigma > 0, got {sigma}"),
            )),
            MomentFamily::Explicit(values) if values.is_empty() => {
                Err(Error::Domain("explicit sequence is empty".into()))
            }
            _ => Ok(()),
        }
    }

    /// Whether the backend can produce the moments of this family.
    pub fn check_backend(&self, backend: Backend) -> Result<()> {
        let refuse = |why: &str| {
            Err(Error::UnsupportedBackend {
                operation: format!("{} moments ({why})", self.name()),
                backend: backend.to_string(),
            })
        };
        match (self, backend) {
            (MomentFamily::PowerLog { c }, Backend::Rational) if !rational_is_integer(c) => {
                refuse("non-integer exponent gives irrational moments")
            }
            (MomentFamily::LogNormal { .. }, Backend::Rational) => {
                refuse("moments are transcendental")
            }
            _ => Ok(()),
        }
    }

    /// `true` when all odd moments vanish.
    pub fn is_symmetric(&self) -> bool {
        match self {
            MomentFamily::Gegenbauer { .. } | MomentFamily::Gaussian => true,
            MomentFamily::Discrete(mu) => mu.is_symmetric(),
            MomentFamily::Explicit(v) => v.iter().skip(1).step_by(2).all(|x| x == &RBig::ZERO),
            _ => false,
        }
    }

    /// Largest Hankel dimension usable at machine precision, if limited.
    pub fn machine_dimension_limit(&self) -> Option<usize> {
        matches!(self, MomentFamily::LogNormal { .. }).then_some(LOG_NORMAL_MACHINE_LIMIT)
    }

    /// Verdicts known from the family's tail behaviour, `None` for tabulated data.
    pub fn analytic_verdicts(&self) -> Option<TailVerdicts> {
        use Verdict::{No, Yes};
        let v = |o1, o1n, l1| {
            Some(TailVerdicts {
                is_o1: o1,
                is_o_1_over_n: o1n,
                is_ell1: l1,
            })
        };
        match self {
            MomentFamily::PowerLog { c } => {
                let one = RBig::ONE;
                v(Yes, Verdict::from(c >= &one), Verdict::from(c > &one))
            }
            MomentFamily::Gegenbauer { lambda } => {
                let half = rational_ratio(1, 2);
                v(Yes, Verdict::from(lambda >= &half), Verdict::from(lambda > &half))
            }
            MomentFamily::Discrete(mu) => {
                if mu.max_abs_point() < RBig::ONE {
                    v(Yes, Yes, Yes)
                } else {
                    v(No, No, No)
                }
            }
            MomentFamily::LogNormal { .. } | MomentFamily::Gaussian => v(No, No, No),
            MomentFamily::Explicit(_) => None,
        }
    }
}

/// Machine floats are only accepted for log-normal Hankel truncations up to this size.
pub const LOG_NORMAL_MACHINE_LIMIT: usize = 8;

#[derive(Clone, Debug)]
enum Source {
    Family(MomentFamily),
    /// `ν_n = m_n - m_{n+2}`, moments of `(1 - x²) dμ`.
    Nu(Box<Source>),
}

/// A moment family bound to a backend, with an append-only cache.
#[derive(Debug)]
pub struct MomentSequence<T: Real> {
    source: Source,
    ctx: T::Ctx,
    cache: RwLock<Vec<T>>,
}

impl<T: Real> Clone for MomentSequence<T> {
    fn clone(&self) -> Self {
        Self {
            source: self.source.clone(),
            ctx: self.ctx,
            cache: RwLock::new(self.cache.read().expect("moment cache poisoned").clone()),
        }
    }
}

impl<T: Real> MomentSequence<T> {
    pub fn new(family: MomentFamily, ctx: T::Ctx) -> Result<Self> {
        family.validate()?;
        family.check_backend(T::backend(ctx))?;
        Ok(Self {
            source: Source::Family(family),
            ctx,
            cache: RwLock::new(Vec::new()),
        })
    }

    pub fn ctx(&self) -> T::Ctx {
        self.ctx
    }

    pub fn backend(&self) -> Backend {
        T::backend(self.ctx)
    }

    /// The underlying family; `None` for derived sequences such as [`Self::nu_moments`].
    pub fn family(&self) -> Option<&MomentFamily> {
        match &self.source {
            Source::Family(f) => Some(f),
            Source::Nu(_) => None,
        }
    }

    /// Root family of a derived sequence.
    fn root_family(&self) -> &MomentFamily {
        let mut s = &self.source;
        loop {
            match s {
                Source::Family(f) => return f,
                Source::Nu(inner) => s = inner,
            }
        }
    }

    /// Length of the stored prefix available for explicit data.
    pub fn available(&self) -> Option<usize> {
        match &self.source {
            Source::Family(MomentFamily::Explicit(v)) => Some(v.len()),
            Source::Family(_) => None,
            Source::Nu(_) => match self.root_family() {
                MomentFamily::Explicit(v) => Some(v.len().saturating_sub(2)),
                _ => None,
            },
        }
    }

    /// `m_n`.
    pub fn moment(&self, n: usize) -> Result<T> {
        {
            let cache = self.cache.read().expect("moment cache poisoned");
            if let Some(v) = cache.get(n) {
                return Ok(v.clone());
            }
        }
        self.materialize(n + 1)?;
        Ok(self.cache.read().expect("moment cache poisoned")[n].clone())
    }

    /// `m_0, ..., m_{len-1}`.
    pub fn moments(&self, len: usize) -> Result<Vec<T>> {
        if len == 0 {
            return Ok(Vec::new());
        }
        self.materialize(len)?;
        Ok(self.cache.read().expect("moment cache poisoned")[..len].to_vec())
    }

    /// Extends the cache to hold at least `len` values. Idempotent.
    pub fn materialize(&self, len: usize) -> Result<()> {
        let mut cache = self.cache.write().expect("moment cache poisoned");
        while cache.len() < len {
            let n = cache.len();
            let value = match &self.source {
                Source::Family(f) => family_moment::<T>(f, n, &cache, self.ctx)?,
                Source::Nu(inner) => {
                    let parent = MomentSequence::<T> {
                        source: (**inner).clone(),
                        ctx: self.ctx,
                        cache: RwLock::new(Vec::new()),
                    };
                    // Materialize the parent once for the whole request.
                    let vals = parent.moments(len + 2)?;
                    for j in n..len {
                        cache.push(vals[j].clone() - vals[j + 2].clone());
                    }
                    continue;
                }
            };
            if !value.is_finite() {
                return Err(Error::Precision {
                    message: format!("moment m_{n} overflows {}", T::backend(self.ctx)),
                    required: "bigfloat:<bits>".into(),
                });
            }
            cache.push(value);
        }
        Ok(())
    }

    /// The sequence `ν_n = m_n - m_{n+2}` of the measure `(1 - x²) dμ`.
    pub fn nu_moments(&self) -> MomentSequence<T> {
        MomentSequence {
            source: Source::Nu(Box::new(self.source.clone())),
            ctx: self.ctx,
            cache: RwLock::new(Vec::new()),
        }
    }

    /// Analytic tail verdicts of the root family when the sequence is a family itself.
    pub fn analytic_verdicts(&self) -> Option<TailVerdicts> {
        self.family().and_then(MomentFamily::analytic_verdicts)
    }
}

/// Free-function form of [`MomentSequence::moment`].
pub fn moment<T: Real>(ms: &MomentSequence<T>, n: usize) -> Result<T> {
    ms.moment(n)
}

/// Free-function form of [`MomentSequence::nu_moments`].
pub fn nu_moments<T: Real>(ms: &MomentSequence<T>) -> MomentSequence<T> {
    ms.nu_moments()
}

fn family_moment<T: Real>(family: &MomentFamily, n: usize, prev: &[T], ctx: T::Ctx) -> Result<T> {
    let zero = T::zero(ctx);
    Ok(match family {
        MomentFamily::PowerLog { c } => {
            if rational_is_integer(c) {
                let exp: usize = c
                    .numerator()
                    .try_into()
                    .map_err(|_| Error::Domain(format!("power_log exponent {c} too large")))?;
                let base = T::from_usize(n + 1, ctx);
                T::one(ctx) / powi(&base, exp)
            } else {
                let ln = T::from_usize(n + 1, ctx)
                    .ln()
                    .ok_or_else(|| unsupported::<T>("power_log", ctx))?;
                (-(T::from_rational(c, ctx) * ln))
                    .exp()
                    .ok_or_else(|| unsupported::<T>("power_log", ctx))?
            }
        }
        MomentFamily::Gegenbauer { lambda } => {
            if n % 2 == 1 {
                zero
            } else if n == 0 {
                T::one(ctx)
            } else {
                // m_{2k} = m_{2k-2} (k - 1/2) / (λ + k)
                let k = (n / 2) as i64;
                let num = T::from_rational(&rational_ratio(2 * k - 1, 2), ctx);
                let den = T::from_rational(&(lambda.clone() + Rational::from(k)), ctx);
                prev[n - 2].clone() * num / den
            }
        }
        MomentFamily::Discrete(mu) => mu.moment::<T>(n, ctx),
        MomentFamily::LogNormal { sigma } => {
            let e = Rational::from(n * n) * sigma.clone() * sigma.clone() / Rational::from(2);
            T::from_rational(&e, ctx)
                .exp()
                .ok_or_else(|| unsupported::<T>("log_normal", ctx))?
        }
        MomentFamily::Gaussian => {
            if n % 2 == 1 {
                zero
            } else if n == 0 {
                T::one(ctx)
            } else {
                prev[n - 2].clone() * T::from_usize(n - 1, ctx)
            }
        }
        MomentFamily::Explicit(values) => {
            let v = values.get(n).ok_or(Error::MissingMoment {
                index: n,
                available: values.len(),
            })?;
            T::from_rational(v, ctx)
        }
    })
}

fn unsupported<T: Real>(what: &str, ctx: T::Ctx) -> Error {
    Error::UnsupportedBackend {
        operation: format!("{what} moments"),
        backend: T::backend(ctx).to_string(),
    }
}

/// Three-valued verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

/// Tail predicates of the even moments: `o(1)`, `O(1/n)` and summability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TailVerdicts {
    pub is_o1: Verdict,
    pub is_o_1_over_n: Verdict,
    pub is_ell1: Verdict,
}

impl TailVerdicts {
    /// Enforces `ℓ¹ ⇒ O(1/n) ⇒ o(1)` by downgrading unsupported claims.
    fn monotone(mut self) -> Self {
        if self.is_o1 != Verdict::Yes && self.is_o_1_over_n == Verdict::Yes {
            self.is_o_1_over_n = Verdict::Inconclusive;
        }
        if self.is_o_1_over_n != Verdict::Yes && self.is_ell1 == Verdict::Yes {
            self.is_ell1 = Verdict::Inconclusive;
        }
        if self.is_o_1_over_n == Verdict::No && self.is_ell1 == Verdict::Inconclusive {
            self.is_ell1 = Verdict::No;
        }
        self
    }
}

/// How the verdicts of a [`Classification`] were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictBasis {
    /// Derived from the family's closed form.
    Analytic,
    /// Evidence over a finite window of values only.
    Heuristic,
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Number of even moments in the reported trace partial sum.
    pub trace_terms: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { trace_terms: 10_000 }
    }
}

#[derive(Clone, Debug)]
pub struct Classification<T> {
    /// Largest `M ≤ N` such that the `M x M` Hankel truncation factors.
    pub positive_definite_up_to: usize,
    pub truncation: usize,
    pub verdicts: TailVerdicts,
    /// `sup n |m_n|` over the evidence window `1 ≤ n ≤ 2N - 2`.
    pub sup_n_m_n: f64,
    /// Upper bound (or estimate, for heuristic verdicts) on `Σ_{k ≥ K} m_{2k}`.
    pub tail_bound: Option<f64>,
    /// `Σ_{k<K} m_{2k}`.
    pub trace_partial: T,
    pub trace_terms: usize,
    /// Moment indices inspected for the verdicts.
    pub evidence_window: (usize, usize),
    pub basis: VerdictBasis,
}

/// Classifies a moment sequence at truncation `n`.
pub fn classify<T: Real>(
    ms: &MomentSequence<T>,
    n: usize,
    options: &ClassifyOptions,
) -> Result<Classification<T>> {
    if n < 2 {
        return Err(Error::Domain(format!("classification needs N >= 2, got {n}")));
    }
    let ctx = ms.ctx();
    let avail = ms.available();
    // Hankel positivity on the largest usable truncation.
    let usable = match avail {
        Some(len) => n.min(len.div_ceil(2)).max(1),
        None => n,
    };
    let positive_definite_up_to = if usable == 0 {
        0
    } else {
        let h = HankelMatrix::build(ms, usable)?.to_dense();
        ldl_upper_partial(&h).positive_up_to
    };

    let window_len = match avail {
        Some(len) => len.min(2 * n - 1),
        None => 2 * n - 1,
    };
    let window = ms.moments(window_len)?;
    let sup_n_m_n = window
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, m)| i as f64 * m.to_f64().abs())
        .fold(0.0, f64::max);

    let trace_terms = match avail {
        Some(len) => options.trace_terms.min(len.div_ceil(2)),
        None => options.trace_terms,
    };
    let evens = ms.moments((2 * trace_terms).saturating_sub(1))?;
    // Smallest terms first for floating backends.
    let trace_partial = (0..trace_terms)
        .rev()
        .fold(T::zero(ctx), |acc, k| acc + evens[2 * k].clone());

    let (verdicts, tail_bound, basis) = match ms.family() {
        Some(f) if f.analytic_verdicts().is_some() => {
            let v = f.analytic_verdicts().expect("checked");
            (v, analytic_tail_bound(f, trace_terms, &evens), VerdictBasis::Analytic)
        }
        _ => {
            let (v, tail) = heuristic_verdicts(&window);
            (v, tail, VerdictBasis::Heuristic)
        }
    };

    Ok(Classification {
        positive_definite_up_to,
        truncation: n,
        verdicts: verdicts.monotone(),
        sup_n_m_n,
        tail_bound,
        trace_partial,
        trace_terms,
        evidence_window: (0, window_len.saturating_sub(1)),
        basis,
    })
}

fn analytic_tail_bound<T: Real>(family: &MomentFamily, k: usize, evens: &[T]) -> Option<f64> {
    match family {
        MomentFamily::PowerLog { c } => {
            let c = c.to_f64().value();
            // Convexity: Σ_{j≥K} (2j+1)^{-c} ≤ ∫_{K-1/2}^∞ (2x+1)^{-c} dx.
            (c > 1.0 && k > 0).then(|| (2.0 * k as f64).powf(1.0 - c) / (2.0 * (c - 1.0)))
        }
        MomentFamily::Gegenbauer { lambda } => {
            let l = lambda.to_f64().value();
            if l <= 0.5 {
                return None;
            }
            // Gauss summation: Σ_{j≥K} (1/2)_j/(λ+1)_j = m_{2K} (K+λ)/(λ-1/2).
            let next = if k == 0 {
                1.0
            } else {
                let last = evens[2 * (k - 1)].to_f64();
                last * (k as f64 - 0.5) / (l + k as f64)
            };
            Some(next * (k as f64 + l) / (l - 0.5))
        }
        MomentFamily::Discrete(mu) => {
            let r = mu.max_abs_point().to_f64().value();
            (r < 1.0).then(|| mu.total_mass().to_f64().value() * r.powi(2 * k as i32) / (1.0 - r * r))
        }
        _ => None,
    }
}

/// Window-based evidence for tabulated sequences. Never a proof.
fn heuristic_verdicts<T: Real>(window: &[T]) -> (TailVerdicts, Option<f64>) {
    let abs: Vec<f64> = window.iter().map(|m| m.to_f64().abs()).collect();
    let len = abs.len();
    if len < 8 {
        return (
            TailVerdicts {
                is_o1: Verdict::Inconclusive,
                is_o_1_over_n: Verdict::Inconclusive,
                is_ell1: Verdict::Inconclusive,
            },
            None,
        );
    }
    let quarter = len / 4;
    let head = abs[..quarter].iter().cloned().fold(0.0, f64::max);
    let tail = abs[len - quarter..].iter().cloned().fold(0.0, f64::max);
    let is_o1 = if tail >= head {
        Verdict::No
    } else if tail <= 0.5 * head {
        Verdict::Yes
    } else {
        Verdict::Inconclusive
    };

    let scaled: Vec<f64> = abs.iter().enumerate().map(|(i, m)| i as f64 * m).collect();
    let half = len / 2;
    let first = scaled[1..half].iter().cloned().fold(0.0, f64::max);
    let second = scaled[half..].iter().cloned().fold(0.0, f64::max);
    let is_o_1_over_n = if second <= 1.5 * first.max(f64::MIN_POSITIVE) {
        Verdict::Yes
    } else if second > 2.0 * first {
        Verdict::No
    } else {
        Verdict::Inconclusive
    };

    // Geometric decay of the even moments over the last quarter.
    let evens: Vec<f64> = abs.iter().step_by(2).cloned().collect();
    let m = evens.len();
    let from = m - (m / 4).max(2);
    let ratios: Vec<f64> = evens[from..]
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let r = ratios.iter().cloned().fold(0.0, f64::max);
    let last = evens[m - 1];
    let (is_ell1, tail) = if last == 0.0 {
        (Verdict::Yes, Some(0.0))
    } else if !ratios.is_empty() && r < 0.9 {
        (Verdict::Yes, Some(last * r / (1.0 - r)))
    } else if is_o_1_over_n == Verdict::No {
        (Verdict::No, None)
    } else {
        (Verdict::Inconclusive, None)
    };
    (
        TailVerdicts {
            is_o1,
            is_o_1_over_n,
            is_ell1,
        },
        tail,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational_from_int, BigFloat};

    fn q(p: i64, d: i64) -> Rational {
        rational_ratio(p, d)
    }

    #[test]
    fn power_log_and_gegenbauer_values() {
        let h = MomentSequence::<Rational>::new(MomentFamily::hilbert(), ()).unwrap();
        assert_eq!(h.moment(3).unwrap(), q(1, 4));
        let u = MomentSequence::<Rational>::new(MomentFamily::uniform(), ()).unwrap();
        assert_eq!(u.moment(4).unwrap(), q(1, 5));
        assert_eq!(u.moment(3).unwrap(), Rational::ZERO);
        // Materialization is idempotent.
        assert_eq!(u.moments(10).unwrap(), u.moments(10).unwrap());
    }

    #[test]
    fn discrete_moment() {
        let mu = DiscreteMeasure::new(vec![q(-1, 2), q(0, 1), q(1, 2)], vec![q(1, 4), q(1, 2), q(1, 4)])
            .unwrap();
        let ms = MomentSequence::<Rational>::new(MomentFamily::Discrete(mu), ()).unwrap();
        assert_eq!(ms.moment(2).unwrap(), q(1, 8));
        assert_eq!(ms.moment(1).unwrap(), Rational::ZERO);
    }

    #[test]
    fn parameter_and_backend_errors() {
        let bad = MomentFamily::PowerLog { c: q(-1, 1) };
        assert!(matches!(
            MomentSequence::<f64>::new(bad, ()),
            Err(Error::Domain(_))
        ));
        let irr = MomentFamily::PowerLog { c: q(1, 2) };
        assert!(matches!(
            MomentSequence::<Rational>::new(irr.clone(), ()),
            Err(Error::UnsupportedBackend { .. })
        ));
        assert!(MomentSequence::<f64>::new(irr, ()).is_ok());
        assert!(MomentSequence::<Rational>::new(MomentFamily::LogNormal { sigma: q(1, 1) }, ()).is_err());
        let g = MomentFamily::Gegenbauer { lambda: q(-1, 2) };
        assert!(MomentSequence::<f64>::new(g, ()).is_err());
        let ex = MomentSequence::<Rational>::new(MomentFamily::Explicit(vec![q(1, 1), q(0, 1)]), ()).unwrap();
        assert_eq!(
            ex.moment(2).unwrap_err(),
            Error::MissingMoment {
                index: 2,
                available: 2
            }
        );
    }

    #[test]
    fn gaussian_and_log_normal() {
        let g = MomentSequence::<Rational>::new(MomentFamily::Gaussian, ()).unwrap();
        assert_eq!(g.moments(9).unwrap()[8], rational_from_int(105));
        assert_eq!(g.moment(7).unwrap(), Rational::ZERO);
        let ln = MomentSequence::<f64>::new(MomentFamily::LogNormal { sigma: q(1, 1) }, ()).unwrap();
        assert!((ln.moment(2).unwrap() - 2f64.exp()).abs() < 1e-12);
        assert!(matches!(ln.moment(40), Err(Error::Precision { .. })));
        let big = MomentSequence::<BigFloat>::new(MomentFamily::LogNormal { sigma: q(1, 1) }, 256).unwrap();
        let m40 = big.moment(40).unwrap();
        assert!((Real::to_f64(&Real::ln(&m40).unwrap()) - 800.0).abs() < 1e-9);
    }

    #[test]
    fn nu_sequence() {
        let h = MomentSequence::<Rational>::new(MomentFamily::hilbert(), ()).unwrap();
        assert_eq!(h.nu_moments().moment(0).unwrap(), q(2, 3));
        let u = MomentSequence::<Rational>::new(MomentFamily::uniform(), ()).unwrap();
        let nu = nu_moments(&u);
        for k in 0..6i64 {
            assert_eq!(nu.moment(2 * k as usize).unwrap(), q(1, 2 * k + 1) - q(1, 2 * k + 3));
        }
    }

    #[test]
    fn classification_of_families() {
        let opts = ClassifyOptions { trace_terms: 100 };
        let c2 = MomentSequence::<f64>::new(MomentFamily::PowerLog { c: q(2, 1) }, ()).unwrap();
        let r = classify(&c2, 8, &opts).unwrap();
        assert_eq!(r.verdicts.is_ell1, Verdict::Yes);
        assert!((r.tail_bound.unwrap() - 1.0 / 400.0).abs() < 1e-15);
        let c1 = MomentSequence::<f64>::new(MomentFamily::hilbert(), ()).unwrap();
        let r = classify(&c1, 8, &opts).unwrap();
        assert_eq!(r.verdicts.is_o_1_over_n, Verdict::Yes);
        assert_eq!(r.verdicts.is_ell1, Verdict::No);
        assert!(r.sup_n_m_n < 1.0);
        let ch = MomentSequence::<f64>::new(MomentFamily::PowerLog { c: q(1, 2) }, ()).unwrap();
        assert_eq!(classify(&ch, 8, &opts).unwrap().verdicts.is_o_1_over_n, Verdict::No);
        let g = MomentSequence::<f64>::new(MomentFamily::Gaussian, ()).unwrap();
        assert_eq!(classify(&g, 8, &opts).unwrap().verdicts.is_o1, Verdict::No);
        assert!(classify(&g, 1, &opts).is_err());
    }

    #[test]
    fn explicit_non_positive_definite_is_reported() {
        let vals = (0..20).map(|i| if i % 2 == 0 { q(1, 1) } else { q(0, 1) }).collect();
        let ms = MomentSequence::<Rational>::new(MomentFamily::Explicit(vals), ()).unwrap();
        let r = classify(&ms, 6, &ClassifyOptions::default()).unwrap();
        assert_eq!(r.positive_definite_up_to, 2);
        assert_eq!(r.basis, VerdictBasis::Heuristic);
        assert_eq!(r.verdicts.is_o1, Verdict::No);
        assert_eq!(r.trace_terms, 10);
        assert_eq!(r.trace_partial, rational_from_int(10));
    }

    #[test]
    fn gegenbauer_tail_is_exact_gauss_sum() {
        // λ = 3/2: Σ_k m_{2k} = 1 · (0 + 3/2)/(3/2 - 1/2) = 3/2.
        let ms = MomentSequence::<f64>::new(MomentFamily::Gegenbauer { lambda: q(3, 2) }, ()).unwrap();
        let r = classify(&ms, 4, &ClassifyOptions { trace_terms: 50 }).unwrap();
        let total = r.trace_partial + r.tail_bound.unwrap();
        assert!((total - 1.5).abs() < 1e-12, "{total}");
    }
}
