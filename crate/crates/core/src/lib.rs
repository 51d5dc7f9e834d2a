//! Truncated Hankel operators of Hamburger moment sequences.
//!
//! Moment families, exact and arbitrary-precision Hankel truncations, the
//! orthonormal-polynomial factorization `H = CᵗC`, spectral profiles and
//! exact point-mass removal identities on finite measures.

pub mod eigen;
pub mod error;
pub mod extremal;
pub mod hankel;
pub mod json;
pub mod linalg;
pub mod matrix;
pub mod moments;
pub mod orthopoly;
pub mod precision;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use extremal::DiscreteMeasure;
pub use hankel::HankelMatrix;
pub use json::MomentSpec;
pub use matrix::Matrix;
pub use moments::{MomentFamily, MomentSequence};
pub use orthopoly::TriangularPair;
pub use precision::PrecisionPolicy;
pub use scalar::{Backend, BigFloat, Rational, Real};

/// Crate version, embedded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
