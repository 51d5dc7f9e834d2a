#![allow(dead_code)]

//! Bodies of the fuzz targets. Shared with the seed replay test in the main
//! workspace, so it may only use `hankel_moments`, `hankel_cli` and `serde_json`.

use hankel_cli::config::parse_config_text;
use hankel_cli::{Command, Overrides};
use hankel_moments::matrix::vec_from_json;
use hankel_moments::scalar::{format_rational, parse_rational};
use hankel_moments::{Backend, BigFloat, DiscreteMeasure, Matrix, MomentSpec, PrecisionPolicy, Rational, Real, TriangularPair};
use serde_json::Value;

pub fn moment_spec(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = MomentSpec::parse_json(text) {
        // Whatever parses must survive a round trip unchanged.
        let back = MomentSpec::from_json(&spec.to_json()).expect("re-parse of emitted spec");
        assert_eq!(back, spec);
    }
}

pub fn measure(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mu) = DiscreteMeasure::parse_json(text) {
        assert!(!mu.is_empty());
        assert_eq!(DiscreteMeasure::from_json(&mu.to_json()).unwrap(), mu);
    }
}

pub fn rational(data: &[u8]) {
    // Long digit strings only slow the run down.
    if data.len() > 512 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = parse_rational(text) {
        assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }
}

pub fn precision_flags(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(b) = text.parse::<Backend>() {
        assert_eq!(b.to_string().parse::<Backend>().unwrap(), b);
    }
    if let Ok(p) = text.parse::<PrecisionPolicy>() {
        assert_eq!(p.to_string().parse::<PrecisionPolicy>().unwrap(), p);
    }
}

pub fn scalar_json(data: &[u8]) {
    if data.len() > 2048 {
        return;
    }
    let Ok(v) = serde_json::from_slice::<Value>(data) else { return };
    let _ = <Rational as Real>::from_json(&v, ());
    let _ = <f64 as Real>::from_json(&v, ());
    let _ = <BigFloat as Real>::from_json(&v, 64);
    let _ = vec_from_json::<Rational>(&v, ());
    if let Ok(m) = Matrix::<Rational>::from_json(&v, ()) {
        assert_eq!(Matrix::<Rational>::from_json(&m.to_json(), ()).unwrap(), m);
    }
}

pub fn triangular_json(data: &[u8]) {
    if data.len() > 4096 {
        return;
    }
    let Ok(v) = serde_json::from_slice::<Value>(data) else { return };
    if let Ok(tp) = TriangularPair::<Rational>::from_json(&v, ()) {
        let again = TriangularPair::<Rational>::from_json(&tp.to_json(), ()).unwrap();
        assert_eq!(again.to_json(), tp.to_json());
    }
}

pub fn experiment_config(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config_text(text) {
        for c in [Command::Classify, Command::Spectrum, Command::Extremal, Command::Bench] {
            let _ = cfg.resolve(c, &Overrides::default());
        }
    }
}
