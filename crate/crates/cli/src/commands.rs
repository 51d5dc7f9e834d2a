use std::time::Instant;

use hankel_moments::extremal::{perturbation_check, PerturbationReport};
use hankel_moments::hankel::{matvec_fft, matvec_naive};
use hankel_moments::moments::{classify, Classification, ClassifyOptions};
use hankel_moments::scalar::{format_bigfloat, format_f64};
use hankel_moments::spectral::{plateau_verdict, profile_point, ProfilePoint, SpectralProfile};
use hankel_moments::{Backend, BigFloat, DiscreteMeasure, MomentFamily, MomentSequence, Rational, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Command, Resolved};
use crate::error::CliError;
use crate::report::{
    BenchTiming, PointTiming, RunOutput, RunReport, Table, Timings, BENCH_CITATION, CLASSIFY_CITATION,
    KERNEL_CITATION, PERTURBATION_CITATION, SPECTRUM_CITATION,
};

/// Maps `f` over the grid on `jobs` threads, keeping grid order.
fn map_grid<R: Send>(
    jobs: usize,
    grid: &[usize],
    f: impl Fn(usize) -> R + Sync,
) -> Result<Vec<(R, PointTiming)>, CliError> {
    let timed = |n: usize| {
        let t = Instant::now();
        let r = f(n);
        (r, PointTiming { n, ms: t.elapsed().as_secs_f64() * 1e3 })
    };
    if jobs <= 1 {
        return Ok(grid.iter().map(|&n| timed(n)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Run(e.to_string()))?;
    Ok(pool.install(|| grid.par_iter().map(|&n| timed(n)).collect()))
}

fn report(r: &Resolved, checks: Vec<&'static str>, results: Vec<Value>, summary: Value, timings: Timings) -> RunReport {
    RunReport {
        tool: "hankel",
        version: env!("CARGO_PKG_VERSION"),
        library_version: hankel_moments::VERSION,
        command: r.command.name(),
        config: r.echo.clone(),
        backend: r.spec.backend.to_string(),
        precision: match r.command {
            Command::Spectrum => r.policy.to_string(),
            _ => r.spec.backend.to_string(),
        },
        checks,
        results,
        summary,
        timings,
    }
}

pub fn run(r: &Resolved) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let mut out = match r.command {
        Command::Classify => cmd_classify(r),
        Command::Spectrum => cmd_spectrum(r),
        Command::Extremal => cmd_extremal(r),
        Command::Bench => cmd_bench(r),
    }?;
    out.report.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

// classify

fn classify_at<T: Real>(family: &MomentFamily, ctx: T::Ctx, n: usize, terms: usize) -> hankel_moments::Result<Classification<T>> {
    let ms = MomentSequence::<T>::new(family.clone(), ctx)?;
    classify(&ms, n, &ClassifyOptions { trace_terms: terms })
}

fn classification_json<T: Real>(n: usize, c: &Classification<T>) -> Value {
    json!({
        "n": n,
        "positive_definite_up_to": c.positive_definite_up_to,
        "is_o1": c.verdicts.is_o1,
        "is_o_1_over_n": c.verdicts.is_o_1_over_n,
        "is_ell1": c.verdicts.is_ell1,
        "basis": c.basis,
        "sup_n_m_n": c.sup_n_m_n,
        "tail_bound": c.tail_bound,
        "trace_partial": c.trace_partial.to_json(),
        "trace_partial_decimal": c.trace_partial.to_f64(),
        "trace_terms": c.trace_terms,
        "evidence_window": [c.evidence_window.0, c.evidence_window.1],
    })
}

fn cmd_classify(r: &Resolved) -> Result<RunOutput, CliError> {
    let family = &r.spec.family;
    let terms = r.trace_terms;
    let computed = map_grid(r.jobs, &r.n_grid, |n| match r.spec.backend {
        Backend::Rational => classify_at::<Rational>(family, (), n, terms).map(|c| classification_json(n, &c)),
        Backend::BigFloat { bits } => classify_at::<BigFloat>(family, bits, n, terms).map(|c| classification_json(n, &c)),
        Backend::F64 => classify_at::<f64>(family, (), n, terms).map(|c| classification_json(n, &c)),
    })?;
    let mut results = Vec::new();
    let mut points = Vec::new();
    for (res, t) in computed {
        results.push(res.map_err(CliError::from_run)?);
        points.push(t);
    }
    let mut table = Table::new(&["N", "pd_up_to", "o(1)", "O(1/n)", "l1", "trace_partial", "K", "basis"]);
    let text = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    for v in &results {
        table.push(vec![
            text(&v["n"]),
            text(&v["positive_definite_up_to"]),
            text(&v["is_o1"]),
            text(&v["is_o_1_over_n"]),
            text(&v["is_ell1"]),
            v["trace_partial_decimal"].as_f64().map(format_f64).unwrap_or_default(),
            text(&v["trace_terms"]),
            text(&v["basis"]),
        ]);
    }
    let mut csv = Table::new(&["N", "positive_definite_up_to", "is_o1", "is_o_1_over_n", "is_ell1", "trace_partial", "trace_terms"]);
    for v in &results {
        csv.push(vec![
            text(&v["n"]),
            text(&v["positive_definite_up_to"]),
            text(&v["is_o1"]),
            text(&v["is_o_1_over_n"]),
            text(&v["is_ell1"]),
            text(&v["trace_partial"]),
            text(&v["trace_terms"]),
        ]);
    }
    let timings = Timings { points, ..Default::default() };
    Ok(RunOutput {
        report: report(r, vec![CLASSIFY_CITATION], results, json!({ "family": family.name() }), timings),
        table,
        csv,
        notes: Vec::new(),
    })
}

// spectrum

fn profile_json(p: &ProfilePoint) -> Value {
    json!({
        "n": p.n,
        "lambda_min": p.lambda_min.as_ref().map(Real::to_text),
        "lambda_max": p.lambda_max.to_text(),
        "hs_norm_b": p.hs_norm_b.as_ref().map(Real::to_text),
        "trace_partial": p.trace_partial.to_text(),
        "precision_bits": p.precision_bits,
    })
}

fn cmd_spectrum(r: &Resolved) -> Result<RunOutput, CliError> {
    let family = &r.spec.family;
    let computed = map_grid(r.jobs, &r.n_grid, |n| profile_point(family, n, r.policy, r.extremes))?;
    let (entries, points): (Vec<_>, Vec<_>) = computed
        .into_iter()
        .map(|(res, t)| ((t.n, res), t))
        .unzip();
    let profile = SpectralProfile::from_entries(entries);
    let verdict = plateau_verdict(&profile, r.plateau_window, r.plateau_threshold);

    let opt = |x: &Option<BigFloat>| x.as_ref().map(Real::to_text).unwrap_or_default();
    let mut results = Vec::new();
    let mut table = Table::new(&["N", "lambda_min", "lambda_max", "hs_norm_B", "bits"]);
    let mut csv = Table::new(&["N", "lambda_min", "lambda_max", "hs_norm_B", "precision_bits"]);
    for (n, res) in &profile.entries {
        match res {
            Ok(p) => {
                results.push(profile_json(p));
                let short = |x: &Option<BigFloat>| x.as_ref().map(format_bigfloat).unwrap_or_default();
                table.push(vec![
                    n.to_string(),
                    short(&p.lambda_min),
                    format_bigfloat(&p.lambda_max),
                    short(&p.hs_norm_b),
                    p.precision_bits.to_string(),
                ]);
                csv.push(vec![
                    n.to_string(),
                    opt(&p.lambda_min),
                    p.lambda_max.to_text(),
                    opt(&p.hs_norm_b),
                    p.precision_bits.to_string(),
                ]);
            }
            Err(e) => {
                results.push(json!({ "n": n, "error": e.to_string() }));
                table.push(vec![n.to_string(), format!("error: {e}"), String::new(), String::new(), String::new()]);
            }
        }
    }
    let mut notes = vec![format!(
        "plateau verdict: {} (ratio {}, window {} grid points, threshold {})",
        serde_json::to_value(verdict.verdict).unwrap().as_str().unwrap_or_default(),
        verdict.ratio.map(format_f64).unwrap_or_else(|| "n/a".into()),
        verdict.window,
        format_f64(verdict.threshold),
    )];
    for v in &profile.violations {
        notes.push(format!("monotonicity violation: {} from N={} to N={}", v.quantity, v.n_prev, v.n_next));
    }
    let summary = json!({
        "plateau": verdict,
        "violations": profile.violations,
        "errors": profile.errors().count(),
    });
    let timings = Timings { points, ..Default::default() };
    Ok(RunOutput {
        report: report(r, vec![SPECTRUM_CITATION], results, summary, timings),
        table,
        csv,
        notes,
    })
}

// extremal

fn perturbation_json<T: Real>(mu: &DiscreteMeasure, rep: &PerturbationReport<T>) -> Value {
    json!({
        "n": rep.dimension,
        "deviation": rep.deviation.to_json(),
        "kernel_residuals": rep.kernel_residuals.as_ref().map(|v| v.iter().map(Real::to_json).collect::<Vec<_>>()),
        "coefficients": rep.coefficients.iter().map(Real::to_json).collect::<Vec<_>>(),
        "removed": rep.removed,
        "removed_count": rep.removed_count,
        "remaining_points": mu.len() - rep.removed_count,
    })
}

fn extremal_at<T: Real>(mu: &DiscreteMeasure, remove: &[usize], n: usize, ctx: T::Ctx) -> hankel_moments::Result<(Value, String, String)> {
    let rep = perturbation_check::<T>(mu, remove, n, ctx)?;
    let kernel = match &rep.kernel_residuals {
        Some(v) => {
            let ctx = rep.deviation.ctx();
            hankel_moments::scalar::max_abs(v, ctx).to_text()
        }
        None => "n/a (N > M)".into(),
    };
    Ok((perturbation_json(mu, &rep), rep.deviation.to_text(), kernel))
}

fn cmd_extremal(r: &Resolved) -> Result<RunOutput, CliError> {
    let MomentFamily::Discrete(mu) = &r.spec.family else {
        return Err(CliError::Config(format!(
            "extremal needs a discrete family, got `{}`",
            r.spec.family.name()
        )));
    };
    let computed = map_grid(r.jobs, &r.n_grid, |n| match r.spec.backend {
        Backend::Rational => extremal_at::<Rational>(mu, &r.remove, n, ()),
        Backend::BigFloat { bits } => extremal_at::<BigFloat>(mu, &r.remove, n, bits),
        Backend::F64 => extremal_at::<f64>(mu, &r.remove, n, ()),
    })?;
    let mut results = Vec::new();
    let mut points = Vec::new();
    let mut table = Table::new(&["N", "deviation", "kernel_residual"]);
    for (res, t) in computed {
        let (v, dev, kernel) = res.map_err(CliError::from_run)?;
        table.push(vec![t.n.to_string(), dev, kernel]);
        results.push(v);
        points.push(t);
    }
    let csv = table.clone();
    let banner = hankel_moments::extremal::FINITE_SURROGATE_BANNER;
    let summary = json!({
        "banner": banner,
        "support_size": mu.len(),
        "removed": r.remove,
    });
    let timings = Timings { points, ..Default::default() };
    Ok(RunOutput {
        report: report(r, vec![PERTURBATION_CITATION, KERNEL_CITATION], results, summary, timings),
        table,
        csv,
        notes: vec![banner.to_string(), "kernel residual: max over removed points of |H(mu~) xi(x_j)|^2".into()],
    })
}

// bench

fn time_us(repeats: usize, mut f: impl FnMut()) -> f64 {
    (0..repeats)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64() * 1e6
        })
        .fold(f64::INFINITY, f64::min)
}

fn cmd_bench(r: &Resolved) -> Result<RunOutput, CliError> {
    if r.spec.backend != Backend::F64 {
        return Err(CliError::Config(format!(
            "bench compares against the FFT path, which is float-only; the {} backend is not supported",
            r.spec.backend
        )));
    }
    let ms = MomentSequence::<f64>::new(r.spec.family.clone(), ()).map_err(CliError::from_config)?;
    let mut results = Vec::new();
    let mut bench = Vec::new();
    let mut points = Vec::new();
    let mut table = Table::new(&["N", "max_rel_dev", "naive_us", "fft_us", "speedup"]);
    let mut csv = Table::new(&["N", "max_rel_deviation", "naive_us", "fft_us"]);
    // Timing runs serially whatever --jobs says.
    for &n in &r.n_grid {
        let t0 = Instant::now();
        ms.materialize(2 * n - 1).map_err(CliError::from_run)?;
        let mut rng = ChaCha8Rng::seed_from_u64(r.bench_seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let vectors: Vec<Vec<f64>> = (0..r.bench_vectors)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut worst = 0.0f64;
        for g in &vectors {
            let naive = matvec_naive(&ms, g, n).map_err(CliError::from_run)?;
            let fft = matvec_fft(&ms, g, n).map_err(CliError::from_run)?;
            let scale = naive.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let diff = naive.iter().zip(&fft).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let rel = if scale > 0.0 { diff / scale } else { diff };
            worst = worst.max(rel);
        }
        if !(worst <= r.bench_agreement) {
            return Err(CliError::Run(format!(
                "FFT and naive row actions disagree at N = {n}: relative deviation {} exceeds {}",
                format_f64(worst),
                format_f64(r.bench_agreement)
            )));
        }
        let g = &vectors[0];
        let naive_us = time_us(r.bench_repeats, || {
            std::hint::black_box(matvec_naive(&ms, g, n).ok());
        });
        let fft_us = time_us(r.bench_repeats, || {
            std::hint::black_box(matvec_fft(&ms, g, n).ok());
        });
        results.push(json!({ "n": n, "max_rel_deviation": worst, "vectors": r.bench_vectors }));
        table.push(vec![
            n.to_string(),
            format!("{worst:.2e}"),
            format!("{naive_us:.1}"),
            format!("{fft_us:.1}"),
            format!("{:.2}", naive_us / fft_us),
        ]);
        csv.push(vec![n.to_string(), format_f64(worst), format_f64(naive_us), format_f64(fft_us)]);
        bench.push(BenchTiming { n, naive_us, fft_us });
        points.push(PointTiming { n, ms: t0.elapsed().as_secs_f64() * 1e3 });
    }
    let summary = json!({ "agreement_tolerance": r.bench_agreement });
    let timings = Timings { points, bench, ..Default::default() };
    Ok(RunOutput {
        report: report(r, vec![BENCH_CITATION], results, summary, timings),
        table,
        csv,
        notes: vec!["timings: best of repeated runs, microseconds".into()],
    })
}
