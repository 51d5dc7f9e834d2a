//! Command-line front end for `hankel-moments`: experiment configs in,
//! JSON reports, CSV tables and a printed summary out.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{Command, ExperimentConfig, Overrides};
pub use error::CliError;
pub use report::{RunOutput, RunReport};

/// Loads, validates and runs one command. Nothing is written on failure.
pub fn execute(command: Command, config_path: &Path, overrides: &Overrides) -> Result<RunOutput, CliError> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg = config::parse_config_text(&text)?;
    let resolved = cfg.resolve(command, overrides)?;
    commands::run(&resolved)
}

/// Writes `<command>.json` and `<command>.csv` into `dir`; returns the paths.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let json_path = dir.join(format!("{}.json", out.report.command));
    let csv_path = dir.join(format!("{}.csv", out.report.command));
    let mut json = serde_json::to_string_pretty(&out.report.to_json()).expect("report serializes");
    json.push('\n');
    let csv = out.csv.to_csv().map_err(|e| CliError::Run(e.to_string()))?;
    fs::write(&json_path, json)?;
    fs::write(&csv_path, csv)?;
    Ok(vec![json_path, csv_path])
}
