//! Precision policies and the retry ladder used for ill-conditioned truncations.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::moments::{MomentFamily, MomentSequence};
use crate::orthopoly::{factor, TriangularPair};
use crate::scalar::{BigFloat, MAX_BIGFLOAT_BITS, MIN_BIGFLOAT_BITS};

/// Machine floats are tried only up to this dimension.
pub const MACHINE_LADDER_LIMIT: usize = 12;
/// Relative agreement required between consecutive rungs.
pub const LADDER_AGREEMENT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecisionPolicy {
    Machine,
    Fixed { bits: usize },
    /// Machine floats for small `N`, then `4N + 64` bits, doubling up to `2¹⁶`.
    Ladder,
}

impl fmt::Display for PrecisionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecisionPolicy::Machine => f.write_str("machine"),
            PrecisionPolicy::Fixed { bits } => write!(f, "bigfloat:{bits}"),
            PrecisionPolicy::Ladder => f.write_str("ladder"),
        }
    }
}

impl FromStr for PrecisionPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "machine" | "f64" => Ok(PrecisionPolicy::Machine),
            "ladder" => Ok(PrecisionPolicy::Ladder),
            other => match other.strip_prefix("bigfloat:") {
                Some(b) => {
                    let bits: usize = b
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid precision `{other}`")))?;
                    if !(MIN_BIGFLOAT_BITS..=MAX_BIGFLOAT_BITS).contains(&bits) {
                        return Err(Error::Parse(format!(
                            "precision bits must lie in [{MIN_BIGFLOAT_BITS}, {MAX_BIGFLOAT_BITS}]"
                        )));
                    }
                    Ok(PrecisionPolicy::Fixed { bits })
                }
                None => Err(Error::Parse(format!(
                    "unknown precision policy `{other}` (machine, ladder or bigfloat:<bits>)"
                ))),
            },
        }
    }
}

/// One working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rung {
    Machine,
    Bits(usize),
}

impl Rung {
    /// Significand bits, 53 for machine floats.
    pub fn bits(&self) -> usize {
        match self {
            Rung::Machine => f64::MANTISSA_DIGITS as usize,
            Rung::Bits(b) => *b,
        }
    }
}

fn machine_allowed(family: &MomentFamily, n: usize) -> bool {
    family.machine_dimension_limit().map_or(true, |l| n <= l)
}

/// Precisions tried for dimension `n`, in order.
pub fn rungs(policy: PrecisionPolicy, family: &MomentFamily, n: usize) -> Vec<Rung> {
    match policy {
        PrecisionPolicy::Machine => vec![Rung::Machine],
        PrecisionPolicy::Fixed { bits } => vec![Rung::Bits(bits)],
        PrecisionPolicy::Ladder => {
            let mut out = Vec::new();
            if n <= MACHINE_LADDER_LIMIT && machine_allowed(family, n) {
                out.push(Rung::Machine);
            }
            let mut b = (4 * n + 64).max(MIN_BIGFLOAT_BITS);
            while b <= MAX_BIGFLOAT_BITS {
                out.push(Rung::Bits(b));
                b *= 2;
            }
            out
        }
    }
}

/// A factorization at whichever precision succeeded.
#[derive(Clone, Debug)]
pub enum LadderFactor {
    Machine(TriangularPair<f64>),
    Big(TriangularPair<BigFloat>),
}

impl LadderFactor {
    pub fn bits(&self) -> usize {
        match self {
            LadderFactor::Machine(_) => f64::MANTISSA_DIGITS as usize,
            LadderFactor::Big(tp) => tp.pivots()[0].precision(),
        }
    }
}

/// Factors the `n × n` truncation, moving up the rungs on pivot failure.
pub fn factor_with_policy(family: &MomentFamily, n: usize, policy: PrecisionPolicy) -> Result<LadderFactor> {
    let ladder = rungs(policy, family, n);
    let mut last = Error::PrecisionExhausted { dimension: n, bits: 0 };
    for rung in ladder {
        let attempt = match rung {
            Rung::Machine => MomentSequence::<f64>::new(family.clone(), ())
                .and_then(|ms| factor(&ms, n))
                .map(LadderFactor::Machine),
            Rung::Bits(bits) => MomentSequence::<BigFloat>::new(family.clone(), bits)
                .and_then(|ms| factor(&ms, n))
                .map(LadderFactor::Big),
        };
        match attempt {
            Ok(f) => return Ok(f),
            Err(e @ (Error::Positivity { .. } | Error::Precision { .. })) => {
                last = match (&e, policy) {
                    (_, PrecisionPolicy::Ladder) => Error::PrecisionExhausted {
                        dimension: n,
                        bits: rung.bits(),
                    },
                    _ => e,
                };
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}
