use hankel_moments::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    /// Invalid configuration or arguments; exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// Failure while computing; exit code 1.
    #[error("run failed: {0}")]
    Run(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }

    /// Library errors raised while validating the configuration.
    pub fn from_config(e: Error) -> Self {
        CliError::Config(e.to_string())
    }

    /// Library errors raised during a run. Errors caused by the inputs stay
    /// configuration errors; numerical failures are run failures.
    pub fn from_run(e: Error) -> Self {
        match e {
            Error::Positivity { .. }
            | Error::Precision { .. }
            | Error::PrecisionExhausted { .. } => CliError::Run(e.to_string()),
            Error::HypothesisViolation { .. } => CliError::Config(format!(
                "{e}; see {}",
                crate::report::PERTURBATION_CITATION
            )),
            _ => CliError::Config(e.to_string()),
        }
    }
}
