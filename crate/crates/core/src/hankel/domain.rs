//! Truncation evidence for membership of a coefficient sequence in the form
//! domain (`Σ m_{k+l} g_k g_l < ∞`) and in the operator domain
//! (`(Σ_k m_{n+k} g_k)_n ∈ ℓ²`). Verdicts are trends, never proofs.

use serde::Serialize;

use super::hankel_correlate;
use crate::error::{Error, Result};
use crate::moments::MomentSequence;

/// Log-log slope below which a profile counts as bounded.
pub const BOUNDED_SLOPE: f64 = 0.05;
/// Log-log slope above which a profile counts as divergent.
pub const DIVERGENT_SLOPE: f64 = 0.2;

/// Coefficients `g_k` given by rule, so every truncation is consistent.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientGenerator {
    /// `g_k = (k+1)^{-d}`.
    PowerDecay { d: f64 },
    /// Finitely supported coefficients.
    Finite(Vec<f64>),
}

impl CoefficientGenerator {
    pub fn coefficients(&self, len: usize) -> Vec<f64> {
        match self {
            CoefficientGenerator::PowerDecay { d } => {
                (0..len).map(|k| ((k + 1) as f64).powf(-d)).collect()
            }
            CoefficientGenerator::Finite(v) => {
                (0..len).map(|k| v.get(k).copied().unwrap_or(0.0)).collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Bounded,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendEvidence {
    pub grid: Vec<usize>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub verdict: Trend,
}

#[derive(Clone, Debug, Serialize)]
pub struct DomainVerdict {
    /// Growth of `Q_K = Σ_{k,l<K} m_{k+l} g_k g_l` over the K grid.
    pub in_v_mu: TrendEvidence,
    /// Growth of `Σ_{n<W} u_n²`, `u_n = Σ_k m_{n+k} g_k`, over the window grid.
    pub in_d_h: TrendEvidence,
    pub heuristic: bool,
}

#[derive(Clone, Debug)]
pub struct DomainOptions {
    pub k_grid: Vec<usize>,
    pub n_window: Vec<usize>,
    pub bounded_slope: f64,
    pub divergent_slope: f64,
}

impl Default for DomainOptions {
    /// Quarter-decade grids over the top decade: `K ∈ [10⁴, 10⁵]`, `W ∈ [10², 10³]`.
    fn default() -> Self {
        let decade = |lo: i32| -> Vec<usize> {
            (0..=4)
                .map(|i| 10f64.powf(lo as f64 + i as f64 / 4.0).round() as usize)
                .collect()
        };
        Self {
            k_grid: decade(4),
            n_window: decade(2),
            bounded_slope: BOUNDED_SLOPE,
            divergent_slope: DIVERGENT_SLOPE,
        }
    }
}

/// Least-squares slope of `ln y` against `ln x` over the positive entries.
pub fn fit_log_slope(xs: &[usize], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y > 0.0 && y.is_finite())
        .map(|(x, y)| ((*x as f64).ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn classify_trend(grid: Vec<usize>, values: Vec<f64>, opts: &DomainOptions) -> TrendEvidence {
    let all_zero = values.iter().all(|v| *v == 0.0);
    let slope = if all_zero {
        Some(0.0)
    } else {
        fit_log_slope(&grid, &values)
    };
    let verdict = match slope {
        Some(s) if s < opts.bounded_slope => Trend::Bounded,
        Some(s) if s > opts.divergent_slope => Trend::Divergent,
        _ => Trend::Inconclusive,
    };
    TrendEvidence {
        grid,
        values,
        slope: slope.unwrap_or(f64::NAN),
        verdict,
    }
}

/// Trend diagnostics for `g` against the Hankel form of `ms`.
pub fn domain_diagnostic(
    ms: &MomentSequence<f64>,
    g: &CoefficientGenerator,
    options: &DomainOptions,
) -> Result<DomainVerdict> {
    let valid = |grid: &[usize]| grid.len() >= 2 && grid.iter().all(|&k| k > 0);
    if !valid(&options.k_grid) || !valid(&options.n_window) {
        return Err(Error::Domain(
            "domain diagnostic needs at least two positive grid points per grid".into(),
        ));
    }
    let k_max = *options.k_grid.iter().max().expect("non-empty");
    let w_max = *options.n_window.iter().max().expect("non-empty");
    let moments = ms.moments(k_max + w_max.max(k_max))?;
    let coeffs = g.coefficients(k_max);

    let q_values: Vec<f64> = options
        .k_grid
        .iter()
        .map(|&k| {
            let u = hankel_correlate(&moments[..2 * k - 1], &coeffs[..k], k);
            u.iter().zip(&coeffs[..k]).map(|(a, b)| a * b).sum()
        })
        .collect();
    let in_v_mu = classify_trend(options.k_grid.clone(), q_values, options);

    let u = hankel_correlate(&moments[..w_max + k_max - 1], &coeffs, w_max);
    let mut prefix = Vec::with_capacity(w_max + 1);
    prefix.push(0.0);
    for x in &u {
        prefix.push(prefix.last().copied().unwrap_or(0.0) + x * x);
    }
    let s_values: Vec<f64> = options.n_window.iter().map(|&w| prefix[w]).collect();
    let mut in_d_h = classify_trend(options.n_window.clone(), s_values, options);
    // Operator domain sits inside the form domain.
    if in_d_h.verdict == Trend::Bounded && in_v_mu.verdict != Trend::Bounded {
        in_d_h.verdict = Trend::Inconclusive;
    }
    if in_v_mu.verdict == Trend::Divergent {
        in_d_h.verdict = Trend::Divergent;
    }
    Ok(DomainVerdict {
        in_v_mu,
        in_d_h,
        heuristic: true,
    })
}
