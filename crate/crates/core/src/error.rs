use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A family parameter, index or dimension lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("moment m_{index} requested but only {available} values are stored")]
    MissingMoment { index: usize, available: usize },

    /// The working precision cannot represent the requested values.
    #[error("precision error: {message} (use the {required} backend)")]
    Precision { message: String, required: String },

    #[error("operation `{operation}` is not supported by the {backend} backend")]
    UnsupportedBackend { operation: String, backend: String },

    /// A pivot of the triangular factorization was not strictly positive.
    #[error(
        "Hankel truncation is not positive definite at leading dimension {dimension}{}",
        if *.precision_suspect { " (possibly precision exhaustion)" } else { "" }
    )]
    Positivity {
        dimension: usize,
        precision_suspect: bool,
    },

    #[error("precision ladder exhausted at N = {dimension} after reaching {bits} bits")]
    PrecisionExhausted { dimension: usize, bits: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("removing the selected masses leaves an empty measure")]
    EmptyMeasure,

    #[error("index {index} out of range for a measure with {len} points")]
    InvalidIndex { index: usize, len: usize },

    /// A removed point violates |x| < 1, required by the mass-removal correction.
    #[error("point {point} violates |x| < 1 required by the rank-one mass-removal correction")]
    HypothesisViolation { point: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
