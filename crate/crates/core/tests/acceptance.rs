//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use hankel_moments::extremal::{cd_kernel, kernel_vector_check, perturbation_check, remove_masses, DiscreteMeasure};
use hankel_moments::hankel::{
    apply_h_via_series, domain_diagnostic, matvec_fft, matvec_naive, v_vector, CoefficientGenerator, DomainOptions,
    HankelMatrix, SeriesOptions, Trend,
};
use hankel_moments::moments::{classify, ClassifyOptions, MomentFamily, MomentSequence, Verdict};
use hankel_moments::orthopoly::factor;
use hankel_moments::precision::PrecisionPolicy;
use hankel_moments::scalar::{rational_ratio, Rational, Real};
use hankel_moments::spectral::{
    h_xi_identity, lambda_profile, plateau_verdict, Extremes, PlateauKind, PLATEAU_THRESHOLD, PLATEAU_WINDOW,
};
use hankel_moments::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(p: i64, d: i64) -> Rational {
    rational_ratio(p, d)
}

/// Random measure with `m` distinct rational points in (-1, 1) and positive rational weights.
fn random_measure(rng: &mut ChaCha8Rng, m: usize) -> DiscreteMeasure {
    let mut pairs: Vec<(Rational, Rational)> = Vec::new();
    while pairs.len() < m {
        let den = rng.gen_range(2..=12i64);
        let num = rng.gen_range(-(den - 1)..=den - 1);
        let x = q(num, den);
        if pairs.iter().any(|(p, _)| *p == x) {
            continue;
        }
        pairs.push((x, q(rng.gen_range(1..=9), rng.gen_range(1..=9))));
    }
    DiscreteMeasure::from_pairs(pairs).unwrap()
}

/// Leading principal minors by fraction-free elimination, an oracle for the pivots.
fn leading_minors(h: &Matrix<Rational>) -> Vec<Rational> {
    let n = h.rows();
    (1..=n)
        .map(|k| {
            let mut a: Vec<Vec<Rational>> = (0..k).map(|i| (0..k).map(|j| h[(i, j)].clone()).collect()).collect();
            let mut det = Rational::ONE;
            for c in 0..k {
                let Some(p) = (c..k).find(|&r| a[r][c] != Rational::ZERO) else {
                    return Rational::ZERO;
                };
                if p != c {
                    a.swap(p, c);
                    det = -det;
                }
                det = det * a[c][c].clone();
                for r in c + 1..k {
                    let f = a[r][c].clone() / a[c][c].clone();
                    for j in c..k {
                        let v = a[c][j].clone();
                        a[r][j] = a[r][j].clone() - f.clone() * v;
                    }
                }
            }
            det
        })
        .collect()
}

fn factorization_exact(ms: &MomentSequence<Rational>, n: usize, label: &str) -> Result<(), String> {
    let tp = factor(ms, n).map_err(|e| format!("{label} N={n}: {e}"))?;
    let h = HankelMatrix::build(ms, n).unwrap().to_dense();
    ensure(tp.reconstruction_deviation(&h) == Rational::ZERO, || format!("{label} N={n}: CᵗC ≠ H"))?;
    ensure(tp.inverse_deviation() == Rational::ZERO, || format!("{label} N={n}: CB ≠ I"))?;
    let minors = leading_minors(&h);
    let mut prev = Rational::ONE;
    for (k, d) in tp.pivots().iter().enumerate() {
        ensure(*d == minors[k].clone() / prev.clone(), || format!("{label} N={n}: pivot {k} ≠ minor ratio"))?;
        prev = minors[k].clone();
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let mut checks = 0;
    for lam in [q(0, 1), q(1, 2), q(1, 1), q(3, 2)] {
        let ms = MomentSequence::<Rational>::new(MomentFamily::Gegenbauer { lambda: lam.clone() }, ()).unwrap();
        for n in 1..=16 {
            factorization_exact(&ms, n, &format!("gegenbauer λ={lam}"))?;
            checks += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..40 {
        let m = rng.gen_range(1..=6);
        let mu = random_measure(&mut rng, m);
        let ms = MomentSequence::<Rational>::new(MomentFamily::Discrete(mu), ()).unwrap();
        // A measure with M points has positive definite truncations exactly up to N = M.
        for n in 1..=m {
            factorization_exact(&ms, n, "discrete")?;
            checks += 1;
        }
        if m < 16 {
            ensure(factor(&ms, m + 1).is_err(), || format!("M={m}: N=M+1 should be singular"))?;
        }
    }
    Ok(format!("{checks} exact factorizations, zero deviation"))
}

fn criterion_2() -> Outcome {
    let ts = [q(0, 1), q(1, 3), q(1, 2), q(-2, 3)];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut families = vec![
        MomentFamily::hilbert(),
        MomentFamily::uniform(),
        MomentFamily::Gegenbauer { lambda: q(1, 1) },
    ];
    for _ in 0..3 {
        families.push(MomentFamily::Discrete(random_measure(&mut rng, 6)));
    }
    let mut checks = 0;
    for fam in families {
        let ms = MomentSequence::<Rational>::new(fam.clone(), ()).unwrap();
        let top = if matches!(fam, MomentFamily::Discrete(_)) { 6 } else { 12 };
        for n in 1..=top {
            let tp = factor(&ms, n).map_err(|e| e.to_string())?;
            for t in &ts {
                let expanded = tp.expand_monomials(t);
                let mut pw = Rational::ONE;
                for (k, v) in expanded.iter().enumerate() {
                    ensure(*v == pw, || format!("{} N={n} t={t}: Σ c P_k ≠ t^{k}", fam.name()))?;
                    pw = pw * t.clone();
                }
                let r = h_xi_identity(&tp, t);
                ensure(r.residuals.iter().all(|x| *x == Rational::ZERO), || {
                    format!("{} N={n} t={t}: CᵗCξ(t) ≠ (tⁿ)", fam.name())
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} (family, N, t) cases exact"))
}

fn criterion_3() -> Outcome {
    let grid: Vec<usize> = (2..=512).step_by(2).collect();
    let start = Instant::now();
    let profile = lambda_profile(&MomentFamily::hilbert(), &grid, PrecisionPolicy::Ladder, Extremes::MaxOnly);
    let elapsed = start.elapsed();
    if let Some((n, e)) = profile.errors().next() {
        return Err(format!("N={n}: {e}"));
    }
    let vals: Vec<f64> = profile.points().map(|p| p.lambda_max.to_f64().value()).collect();
    ensure(vals.len() == grid.len(), || "missing grid points".into())?;
    for (i, w) in vals.windows(2).enumerate() {
        ensure(w[1] > w[0], || format!("not increasing at N={}: {} -> {}", grid[i + 1], w[0], w[1]))?;
    }
    ensure(vals.iter().all(|v| *v < PI), || "value ≥ π".into())?;
    let oracle = (4.0 + 13f64.sqrt()) / 6.0;
    ensure((vals[0] - oracle).abs() < 1e-12, || format!("λ_max(2) = {} vs {oracle}", vals[0]))?;
    ensure(elapsed < Duration::from_secs(60), || format!("runtime {elapsed:?}"))?;
    Ok(format!(
        "λ_max strictly increasing to {:.6} at N=512 (< π), |λ_max(2) - (4+√13)/6| = {:.1e}, {elapsed:.1?}",
        vals[vals.len() - 1],
        (vals[0] - oracle).abs()
    ))
}

fn criterion_4() -> Outcome {
    let ms = MomentSequence::<f64>::new(MomentFamily::PowerLog { c: q(2, 1) }, ()).unwrap();
    let target = PI * PI / 8.0;
    let mut parts = Vec::new();
    for k in [100usize, 1_000, 10_000] {
        let c = classify(&ms, 4, &ClassifyOptions { trace_terms: k }).map_err(|e| e.to_string())?;
        ensure(c.verdicts.is_ell1 == Verdict::Yes, || "is_ell1 not yes".into())?;
        let gap = (c.trace_partial - target).abs();
        ensure(gap <= 1.0 / (4.0 * k as f64) + 1e-12, || format!("K={k}: gap {gap:e}"))?;
        parts.push(format!("K={k}: gap {gap:.3e}"));
    }
    Ok(parts.join(", "))
}

fn criterion_5() -> Outcome {
    let n = 32;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checks = 0;
    for fam in [MomentFamily::hilbert(), MomentFamily::uniform(), MomentFamily::Gegenbauer { lambda: q(1, 1) }] {
        let ms = MomentSequence::<Rational>::new(fam.clone(), ()).unwrap();
        for _ in 0..5 {
            let mut g = vec![Rational::ZERO; 11];
            for k in 0..=8 {
                let a = q(rng.gen_range(-9..=9), rng.gen_range(1..=9));
                for (i, v) in v_vector::<Rational>(k, ()).into_iter().enumerate() {
                    g[i] = g[i].clone() + a.clone() * v;
                }
            }
            let series = apply_h_via_series(&ms, &g, n, &SeriesOptions::default()).map_err(|e| e.to_string())?;
            let naive = matvec_naive(&ms, &g, n).map_err(|e| e.to_string())?;
            ensure(series.result[..n - 10] == naive[..n - 10], || format!("{} mismatch", fam.name()))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} vectors in span{{v_0..v_8}}, first N-10 coordinates identical at N=32"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut timing = Vec::new();
    for fam in [MomentFamily::hilbert(), MomentFamily::uniform()] {
        let ms = MomentSequence::<f64>::new(fam.clone(), ()).unwrap();
        for n in [8usize, 64, 512, 4096] {
            let (mut t_naive, mut t_fft) = (Duration::ZERO, Duration::ZERO);
            for _ in 0..100 {
                let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let t0 = Instant::now();
                let a = matvec_naive(&ms, &g, n).unwrap();
                t_naive += t0.elapsed();
                let t0 = Instant::now();
                let b = matvec_fft(&ms, &g, n).unwrap();
                t_fft += t0.elapsed();
                let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let dev = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale;
                worst = worst.max(dev);
            }
            if fam == MomentFamily::hilbert() {
                timing.push(format!("N={n} naive {:.2?} fft {:.2?}", t_naive / 100, t_fft / 100));
            }
        }
    }
    ensure(worst < 1e-10, || format!("max relative deviation {worst:e}"))?;
    println!("    bench (per matvec, hilbert): {}", timing.join("; "));
    Ok(format!("max relative deviation {worst:.2e} over 800 vectors"))
}

fn criterion_7() -> Outcome {
    let grid: Vec<usize> = (4..=40).step_by(2).collect();
    let start = Instant::now();
    let mut parts = Vec::new();
    for (fam, want) in [
        (MomentFamily::Gaussian, PlateauKind::DeterminateLike),
        (MomentFamily::LogNormal { sigma: q(1, 1) }, PlateauKind::IndeterminateLike),
    ] {
        let profile = lambda_profile(&fam, &grid, PrecisionPolicy::Ladder, Extremes::Both);
        if let Some((n, e)) = profile.errors().next() {
            return Err(format!("{} N={n}: {e}", fam.name()));
        }
        ensure(profile.violations.is_empty(), || format!("{} monotonicity: {:?}", fam.name(), profile.violations))?;
        let v = plateau_verdict(&profile, PLATEAU_WINDOW, PLATEAU_THRESHOLD);
        ensure(v.verdict == want, || format!("{}: {:?} ratio {:?}", fam.name(), v.verdict, v.ratio))?;
        let bits = profile.points().map(|p| p.precision_bits).max().unwrap_or(0);
        parts.push(format!("{} {:?} (ratio {:.3}, up to {bits} bits)", fam.name(), v.verdict, v.ratio.unwrap_or(f64::NAN)));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("runtime {elapsed:?}"))?;
    Ok(format!("{}, {elapsed:.1?}", parts.join("; ")))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..200 {
        let m = rng.gen_range(1..=6);
        let mu = random_measure(&mut rng, m);
        let removed: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.4)).collect();
        let n = rng.gen_range(1..=16);
        let rep = perturbation_check::<Rational>(&mu, &removed, n, ()).map_err(|e| e.to_string())?;
        ensure(rep.deviation == Rational::ZERO, || format!("trial {trial}: deviation {}", rep.deviation))?;
        // Independent oracle: entries of each correction term are c_j x_j^{k+l}.
        for (idx, &j) in removed.iter().enumerate() {
            let (x, c) = (&mu.points()[j], &mu.weights()[j]);
            for k in 0..n {
                for l in 0..n {
                    let direct = c.clone() * hankel_moments::scalar::powi(x, k + l);
                    let got = rep.coefficients[idx].clone() * rep.projector_blocks[idx][(k, l)].clone();
                    ensure(direct == got, || format!("trial {trial}: correction entry ({k},{l})"))?;
                }
            }
        }
        // Moment additivity against the direct sum.
        if removed.len() < m {
            let rest = remove_masses(&mu, &removed).unwrap();
            for p in 0..8 {
                let gone: Rational = removed.iter().fold(Rational::ZERO, |a, &j| {
                    a + mu.weights()[j].clone() * hankel_moments::scalar::powi(&mu.points()[j], p)
                });
                ensure(mu.moment::<Rational>(p, ()) == rest.moment::<Rational>(p, ()) + gone, || {
                    format!("trial {trial}: additivity at m_{p}")
                })?;
            }
        }
        for i in 0..m {
            for j in 0..m {
                let k = cd_kernel::<Rational>(&mu, &mu.points()[i], &mu.points()[j]).map_err(|e| e.to_string())?;
                let want = if i == j { Rational::ONE / mu.weights()[i].clone() } else { Rational::ZERO };
                ensure(k == want, || format!("trial {trial}: K(x_{i}, x_{j}) = {k}"))?;
            }
        }
        if !removed.is_empty() {
            let res = kernel_vector_check::<Rational>(&mu, &removed, m, ()).map_err(|e| e.to_string())?;
            ensure(res.iter().all(|r| r.residual.iter().all(|v| *v == Rational::ZERO)), || {
                format!("trial {trial}: kernel residual nonzero")
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("runtime {elapsed:?}"))?;
    Ok(format!("200 random measures: deviation 0, K(x_i,x_j) = δ_ij/c_i, kernel residual 0 ({elapsed:.1?})"))
}

fn criterion_9() -> Outcome {
    let ms = MomentSequence::<f64>::new(MomentFamily::PowerLog { c: q(1, 2) }, ()).unwrap();
    let opts = DomainOptions::default();
    ensure(*opts.k_grid.iter().max().unwrap() == 100_000, || "K grid must reach 10^5".into())?;
    let inside = domain_diagnostic(&ms, &CoefficientGenerator::PowerDecay { d: 0.95 }, &opts).map_err(|e| e.to_string())?;
    let outside = domain_diagnostic(&ms, &CoefficientGenerator::PowerDecay { d: 0.55 }, &opts).map_err(|e| e.to_string())?;
    ensure(inside.in_v_mu.verdict == Trend::Bounded, || format!("d=0.95: {:?} slope {}", inside.in_v_mu.verdict, inside.in_v_mu.slope))?;
    ensure(outside.in_v_mu.verdict == Trend::Divergent, || {
        format!("d=0.55: {:?} slope {}", outside.in_v_mu.verdict, outside.in_v_mu.slope)
    })?;
    Ok(format!(
        "d=0.95 bounded (slope {:.4}), d=0.55 divergent (slope {:.4})",
        inside.in_v_mu.slope, outside.in_v_mu.slope
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 exact factorization identities", criterion_1),
        ("2 monomial expansion and H xi(t) = (t^n)", criterion_2),
        ("3 Hilbert lambda_max trend", criterion_3),
        ("4 trace-class partial sums", criterion_4),
        ("5 series representation", criterion_5),
        ("6 FFT matvec equivalence", criterion_6),
        ("7 determinate/indeterminate contrast", criterion_7),
        ("8 mass-removal identities", criterion_8),
        ("9 domain cutoff calibration", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{:.1?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{:.1?}]", start.elapsed());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
