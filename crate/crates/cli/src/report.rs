//! Run reports: JSON document, human table and CSV rows.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;

pub const CLASSIFY_CITATION: &str =
    "tail classes of the even moments: m_2k -> 0 (bounded form), O(1/k) (bounded operator), summable (trace class)";
pub const SPECTRUM_CITATION: &str =
    "extreme eigenvalues of the N x N truncations; lambda_min bounded away from 0 signals an indeterminate problem";
pub const PERTURBATION_CITATION: &str = "point-mass removal identity H(mu) = H(mu~) + sum_j (1 - x_j^2)^-1 mu({x_j}) v_j v_j^T \
     with (v_j v_j^T)_kl = (1 - x_j^2) x_j^(k+l), valid for |x_j| < 1";
pub const KERNEL_CITATION: &str =
    "kernel vectors: H(mu~) xi(x_j) = 0 for every removed point x_j, xi built from the polynomials of mu";
pub const BENCH_CITATION: &str = "row action (sum_k m_(n+k) g_k)_n by direct summation and by FFT correlation";

#[derive(Clone, Debug, Serialize)]
pub struct PointTiming {
    pub n: usize,
    pub ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchTiming {
    pub n: usize,
    pub naive_us: f64,
    pub fft_us: f64,
}

/// Wall-clock data; excluded from the reproducibility guarantee.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub total_ms: f64,
    pub points: Vec<PointTiming>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bench: Vec<BenchTiming>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub library_version: &'static str,
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub backend: String,
    pub precision: String,
    pub checks: Vec<&'static str>,
    pub results: Vec<Value>,
    pub summary: Value,
    pub timings: Timings,
}

impl RunReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// The report without wall-clock data; byte-identical across reruns.
    pub fn deterministic_json(&self) -> Value {
        let mut v = self.to_json();
        if let Value::Object(map) = &mut v {
            map.remove("timings");
        }
        v
    }
}

/// Rows with a header; rendered as an aligned table or as CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&width)
                .map(|(c, w)| format!("{c:>w$}", w = *w))
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &self.header);
        let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &rule);
        for r in &self.rows {
            line(&mut out, r);
        }
        out
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Everything a command produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: RunReport,
    /// Printed to stdout.
    pub table: Table,
    /// Written as `<command>.csv`.
    pub csv: Table,
    /// Extra lines printed under the table.
    pub notes: Vec<String>,
}

impl RunOutput {
    pub fn render(&self) -> String {
        let mut s = if self.report.command == "spectrum" {
            format!("{} (precision {})\n", self.report.command, self.report.precision)
        } else {
            format!("{} ({} backend)\n", self.report.command, self.report.backend)
        };
        s.push_str(&self.table.render());
        for n in &self.notes {
            s.push_str(n);
            s.push('\n');
        }
        s
    }
}
