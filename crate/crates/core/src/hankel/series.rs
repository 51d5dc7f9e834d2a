use super::{check_len, correlate};
use crate::error::{Error, Result};
use crate::moments::{MomentSequence, Verdict};
use crate::scalar::{norm_sq, Real};

/// Stopping tolerance on the ℓ² norm of the last added term (float backends).
pub const SERIES_TOL: f64 = 1e-12;
/// Cap on the number of series terms.
pub const SERIES_MAX_TERMS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct SeriesOptions {
    pub max_terms: usize,
    pub tol: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            max_terms: SERIES_MAX_TERMS,
            tol: SERIES_TOL,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeriesApplyReport<T> {
    pub result: Vec<T>,
    /// ℓ² norm of each term `S^{2l} H_ν g` restricted to the output window.
    pub partial_norm_deltas: Vec<f64>,
    /// Whether the last term vanished (exact backend) or fell below `tol`.
    /// There is one delta per term, so `terms_used == partial_norm_deltas.len()`.
    pub converged: bool,
    pub terms_used: usize,
}

/// Applies `H_μ` to `g` through `Σ_l S^{2l} H_ν g`, with `ν_n = m_n - m_{n+2}`.
///
/// The computation uses the moment data of the `N x N` truncation,
/// `m_0 .. m_{2N-2}`, with later moments taken as zero. On that data the
/// telescoping series terminates, so under the rational backend the result
/// coincides with [`super::matvec_naive`] and the deltas reach exactly zero.
pub fn apply_h_via_series<T: Real>(
    ms: &MomentSequence<T>,
    g: &[T],
    dim: usize,
    options: &SeriesOptions,
) -> Result<SeriesApplyReport<T>> {
    if dim == 0 || options.max_terms == 0 {
        return Err(Error::Domain("series needs N ≥ 1 and at least one term".into()));
    }
    check_len(g, dim)?;
    if let Some(v) = ms.analytic_verdicts() {
        if v.is_o1 == Verdict::No {
            return Err(Error::Precondition(
                "series representation needs moments tending to zero (measure on (-1, 1))".into(),
            ));
        }
    }
    let ctx = ms.ctx();
    let horizon = 2 * dim - 1;
    let m = ms.moments(horizon)?;
    let zero = T::zero(ctx);
    let at = |j: usize| m.get(j).cloned().unwrap_or_else(|| zero.clone());
    // ν_j for j < horizon, zero beyond.
    let mut nu: Vec<T> = (0..horizon).map(|j| at(j) - at(j + 2)).collect();
    nu.extend(std::iter::repeat(zero.clone()).take(g.len()));
    // h = H_ν g on the whole horizon.
    let h = correlate(&nu, g, horizon);

    let mut result = vec![zero.clone(); dim];
    let mut deltas = Vec::new();
    let mut converged = false;
    let mut terms_used = 0;
    for l in 0..options.max_terms {
        let term: Vec<T> = (0..dim)
            .map(|n| h.get(n + 2 * l).cloned().unwrap_or_else(|| zero.clone()))
            .collect();
        let delta = norm_sq(&term, ctx).to_f64().sqrt();
        let vanished = term.iter().all(T::is_zero);
        deltas.push(delta);
        for (r, t) in result.iter_mut().zip(term) {
            let cur = std::mem::replace(r, zero.clone());
            *r = cur + t;
        }
        terms_used = l + 1;
        if vanished || (!T::EXACT && delta < options.tol) {
            converged = true;
            break;
        }
    }
    Ok(SeriesApplyReport {
        result,
        partial_norm_deltas: deltas,
        converged,
        terms_used,
    })
}
