//! JSON form of a moment family bound to a backend:
//! `{"family": "...", "params": {...}, "backend": "rational" | "bigfloat:<bits>" | "f64"}`.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::extremal::DiscreteMeasure;
use crate::moments::MomentFamily;
use crate::scalar::{format_rational, parse_rational, Backend, Rational, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct MomentSpec {
    pub family: MomentFamily,
    pub backend: Backend,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: String,
    #[serde(default)]
    params: Option<Map<String, Value>>,
    #[serde(default)]
    backend: Option<String>,
}

fn scalar_param(params: &Map<String, Value>, key: &str) -> Result<Rational> {
    let v = params
        .get(key)
        .ok_or_else(|| Error::Parse(format!("missing parameter `{key}`")))?;
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::Parse(format!("parameter `{key}` must be a number or \"p/q\" string, got {other}"))),
    }
}

fn only_keys(params: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Parse(format!("unknown parameter `{k}`"))),
        None => Ok(()),
    }
}

impl MomentSpec {
    /// Parses and validates; the backend defaults to `rational` when the family
    /// allows it and `f64` otherwise.
    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: RawSpec = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let empty = Map::new();
        let params = raw.params.as_ref().unwrap_or(&empty);
        let family = match raw.family.as_str() {
            "power_log" => {
                only_keys(params, &["c"])?;
                MomentFamily::PowerLog { c: scalar_param(params, "c")? }
            }
            "gegenbauer" => {
                only_keys(params, &["lambda"])?;
                MomentFamily::Gegenbauer { lambda: scalar_param(params, "lambda")? }
            }
            "log_normal" => {
                only_keys(params, &["sigma"])?;
                MomentFamily::LogNormal { sigma: scalar_param(params, "sigma")? }
            }
            "gaussian" => {
                only_keys(params, &[])?;
                MomentFamily::Gaussian
            }
            "discrete" => MomentFamily::Discrete(DiscreteMeasure::from_json(&Value::Object(params.clone()))?),
            "explicit" => {
                only_keys(params, &["values"])?;
                let values = params
                    .get("values")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("explicit family needs a `values` array".into()))?
                    .iter()
                    .map(|x| <Rational as Real>::from_json(x, ()))
                    .collect::<Result<Vec<_>>>()?;
                MomentFamily::Explicit(values)
            }
            other => return Err(Error::Parse(format!("unknown family `{other}`"))),
        };
        family.validate()?;
        let backend = match raw.backend {
            Some(b) => b.parse()?,
            None if family.check_backend(Backend::Rational).is_ok() => Backend::Rational,
            None => Backend::F64,
        };
        family.check_backend(backend)?;
        Ok(Self { family, backend })
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family.name(),
            "params": family_params(&self.family),
            "backend": self.backend.to_string(),
        })
    }
}

/// The `params` object of a family.
pub fn family_params(family: &MomentFamily) -> Value {
    let q = |x: &Rational| Value::String(format_rational(x));
    match family {
        MomentFamily::PowerLog { c } => json!({ "c": q(c) }),
        MomentFamily::Gegenbauer { lambda } => json!({ "lambda": q(lambda) }),
        MomentFamily::LogNormal { sigma } => json!({ "sigma": q(sigma) }),
        MomentFamily::Gaussian => json!({}),
        MomentFamily::Discrete(mu) => mu.to_json(),
        MomentFamily::Explicit(v) => json!({ "values": v.iter().map(q).collect::<Vec<_>>() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational_ratio;

    #[test]
    fn round_trips() {
        for text in [
            r#"{"family":"power_log","params":{"c":"1/2"},"backend":"f64"}"#,
            r#"{"family":"gegenbauer","params":{"lambda":"3/2"},"backend":"rational"}"#,
            r#"{"family":"log_normal","params":{"sigma":1},"backend":"bigfloat:256"}"#,
            r#"{"family":"gaussian","backend":"f64"}"#,
            r#"{"family":"explicit","params":{"values":["1","0","1/3"]}}"#,
            r#"{"family":"discrete","params":{"points":["-1/2","1/2"],"weights":["1/2","1/2"]}}"#,
        ] {
            let spec = MomentSpec::parse_json(text).unwrap();
            assert_eq!(MomentSpec::from_json(&spec.to_json()).unwrap(), spec, "{text}");
        }
    }

    #[test]
    fn defaults_and_rejections() {
        let s = MomentSpec::parse_json(r#"{"family":"power_log","params":{"c":2}}"#).unwrap();
        assert_eq!(s.backend, Backend::Rational);
        assert_eq!(s.family, MomentFamily::PowerLog { c: rational_ratio(2, 1) });
        let s = MomentSpec::parse_json(r#"{"family":"log_normal","params":{"sigma":"1"}}"#).unwrap();
        assert_eq!(s.backend, Backend::F64);
        for bad in [
            r#"{"family":"power_log","params":{"c":"1/2"},"backend":"rational"}"#,
            r#"{"family":"power_log","params":{"c":"-1"}}"#,
            r#"{"family":"power_log","params":{"c":"1","d":2}}"#,
            r#"{"family":"power_log","params":{"c":"1"},"extra":0}"#,
            r#"{"family":"cauchy"}"#,
            r#"{"family":"gaussian","backend":"bigfloat:12"}"#,
            r#"[1,2]"#,
        ] {
            assert!(MomentSpec::parse_json(bad).is_err(), "{bad}");
        }
    }
}
