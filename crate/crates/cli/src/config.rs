//! Experiment configuration: schema check first, then typed parsing.

use std::path::PathBuf;
use std::sync::OnceLock;

use hankel_moments::precision::PrecisionPolicy;
use hankel_moments::spectral::{Extremes, PLATEAU_THRESHOLD, PLATEAU_WINDOW};
use hankel_moments::MomentSpec;
use jsonschema::JSONSchema;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// The published configuration schema.
pub const SCHEMA: &str = include_str!("../config.schema.json");

pub const DEFAULT_TRACE_TERMS: usize = 10_000;
pub const DEFAULT_BENCH_AGREEMENT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Classify,
    Spectrum,
    Extremal,
    Bench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Spectrum => "spectrum",
            Command::Extremal => "extremal",
            Command::Bench => "bench",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau_window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench_agreement: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Raw configuration as written in the file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub family: Value,
    pub n_grid: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extremes: Option<Extremes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remove: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

fn schema() -> &'static JSONSchema {
    static COMPILED: OnceLock<JSONSchema> = OnceLock::new();
    COMPILED.get_or_init(|| {
        let v: Value = serde_json::from_str(SCHEMA).expect("schema is valid JSON");
        JSONSchema::compile(&v).expect("schema compiles")
    })
}

/// Validates `v` against [`SCHEMA`] and then deserializes it.
pub fn parse_config(v: &Value) -> Result<ExperimentConfig, CliError> {
    if let Err(errors) = schema().validate(v) {
        let msgs: Vec<String> = errors
            .map(|e| {
                let path = e.instance_path.to_string();
                if path.is_empty() {
                    e.to_string()
                } else {
                    format!("{path}: {e}")
                }
            })
            .collect();
        return Err(CliError::Config(format!("schema violation: {}", msgs.join("; "))));
    }
    serde_json::from_value(v.clone()).map_err(|e| CliError::Config(e.to_string()))
}

pub fn parse_config_text(text: &str) -> Result<ExperimentConfig, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
    parse_config(&v)
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub backend: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub command: Command,
    pub spec: MomentSpec,
    pub n_grid: Vec<usize>,
    pub policy: PrecisionPolicy,
    pub extremes: Extremes,
    pub trace_terms: usize,
    pub remove: Vec<usize>,
    pub plateau_window: usize,
    pub plateau_threshold: f64,
    pub bench_agreement: f64,
    pub bench_vectors: usize,
    pub bench_repeats: usize,
    pub bench_seed: u64,
    pub out_dir: Option<PathBuf>,
    pub jobs: usize,
    /// The configuration after overrides, echoed into the report.
    pub echo: ExperimentConfig,
}

impl ExperimentConfig {
    pub fn resolve(&self, command: Command, ov: &Overrides) -> Result<Resolved, CliError> {
        if let Some(c) = self.command {
            if c != command {
                return Err(CliError::Config(format!(
                    "config is for `{}` but `{}` was requested",
                    c.name(),
                    command.name()
                )));
            }
        }
        let mut echo = self.clone();
        echo.command = Some(command);
        if let Some(b) = &ov.backend {
            if let Value::Object(map) = &mut echo.family {
                map.insert("backend".into(), Value::String(b.clone()));
            }
        }
        if let Some(d) = &ov.out_dir {
            echo.out_dir = Some(d.clone());
        }
        if let Some(j) = ov.jobs {
            echo.jobs = Some(j);
        }
        // The overridden family must still satisfy the schema.
        let echo = parse_config(&serde_json::to_value(&echo).expect("config serializes"))?;

        let spec = MomentSpec::from_json(&echo.family).map_err(CliError::from_config)?;
        let mut policy = match &echo.precision {
            Some(p) => p.parse().map_err(CliError::from_config)?,
            None => PrecisionPolicy::Ladder,
        };
        if let Some(b) = &ov.backend {
            // An explicit backend pins the spectral precision as well.
            policy = match b.as_str() {
                "f64" => PrecisionPolicy::Machine,
                "rational" => policy,
                other => other.parse().map_err(CliError::from_config)?,
            };
        }
        if command == Command::Extremal && echo.remove.is_none() {
            return Err(CliError::Config("extremal needs a `remove` list of point indices".into()));
        }
        let tol = echo.tolerances.clone().unwrap_or_default();
        let bench = echo.bench.clone().unwrap_or_default();
        let jobs = echo.jobs.unwrap_or(1);
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        Ok(Resolved {
            command,
            spec,
            n_grid: echo.n_grid.clone(),
            policy,
            extremes: echo.extremes.unwrap_or(Extremes::Both),
            trace_terms: echo.trace_terms.unwrap_or(DEFAULT_TRACE_TERMS),
            remove: echo.remove.clone().unwrap_or_default(),
            plateau_window: tol.plateau_window.unwrap_or(PLATEAU_WINDOW),
            plateau_threshold: tol.plateau_threshold.unwrap_or(PLATEAU_THRESHOLD),
            bench_agreement: tol.bench_agreement.unwrap_or(DEFAULT_BENCH_AGREEMENT),
            bench_vectors: bench.vectors.unwrap_or(3),
            bench_repeats: bench.repeats.unwrap_or(3),
            bench_seed: bench.seed.unwrap_or(0),
            out_dir: echo.out_dir.clone(),
            jobs,
            echo,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn schema_and_struct_agree_on_keys() {
        let schema: Value = serde_json::from_str(SCHEMA).unwrap();
        let mut keys: Vec<&String> = schema["properties"].as_object().unwrap().keys().collect();
        keys.sort();
        let full = json!({
            "command": "spectrum",
            "family": {"family": "gaussian"},
            "n_grid": [2],
            "precision": "ladder",
            "extremes": "both",
            "trace_terms": 10,
            "remove": [0],
            "tolerances": {"plateau_window": 4, "plateau_threshold": 0.5, "bench_agreement": 1e-10},
            "bench": {"vectors": 1, "repeats": 1, "seed": 3},
            "out_dir": "x",
            "jobs": 2
        });
        let cfg = parse_config(&full).unwrap();
        let back = serde_json::to_value(&cfg).unwrap();
        let mut got: Vec<&String> = back.as_object().unwrap().keys().collect();
        got.sort();
        assert_eq!(keys, got);
        for sub in ["tolerances", "bench"] {
            let mut a: Vec<&String> = schema["properties"][sub]["properties"].as_object().unwrap().keys().collect();
            let mut b: Vec<&String> = full[sub].as_object().unwrap().keys().collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "{sub}");
        }
    }

    #[test]
    fn rejects_unknown_and_empty() {
        let base = json!({"family": {"family": "gaussian"}, "n_grid": [2]});
        assert!(parse_config(&base).is_ok());
        let mut extra = base.clone();
        extra["colour"] = json!("red");
        assert!(matches!(parse_config(&extra), Err(CliError::Config(_))));
        let mut empty = base.clone();
        empty["n_grid"] = json!([]);
        assert!(parse_config(&empty).is_err());
        let mut zero = base;
        zero["n_grid"] = json!([0]);
        assert!(parse_config(&zero).is_err());
        assert!(parse_config_text("{").is_err());
    }

    #[test]
    fn backend_override_pins_policy() {
        let cfg = parse_config(&json!({"family": {"family": "power_log", "params": {"c": 1}}, "n_grid": [3]})).unwrap();
        let ov = Overrides {
            backend: Some("bigfloat:256".into()),
            ..Default::default()
        };
        let r = cfg.resolve(Command::Spectrum, &ov).unwrap();
        assert_eq!(r.policy, PrecisionPolicy::Fixed { bits: 256 });
        assert_eq!(r.spec.backend.to_string(), "bigfloat:256");
        assert_eq!(r.echo.family["backend"], json!("bigfloat:256"));
        let ov = Overrides {
            backend: Some("quad".into()),
            ..Default::default()
        };
        assert!(cfg.resolve(Command::Spectrum, &ov).is_err());
        assert!(cfg.resolve(Command::Extremal, &Overrides::default()).is_err());
    }
}
