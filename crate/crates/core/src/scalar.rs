//! Numeric backends.
//!
//! Every algorithm in the crate is generic over [`Real`], which is implemented
//! for three backends:
//!
//! * [`Rational`]: exact arithmetic, closed under `+ - * /` with no rounding;
//! * [`BigFloat`]: binary floating point with a per-computation precision;
//! * `f64`: machine floats.
//!
//! Values carry their own context (the working precision for [`BigFloat`]),
//! so constants are always created through a context obtained from an
//! existing value or from the caller.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_base::{Sign, SquareRoot, UnsignedAbs};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational number.
pub type Rational = RBig;

/// Arbitrary precision binary float (round half to even).
pub type BigFloat = FBig<HalfEven, 2>;

/// Smallest admissible precision for the big-float backend.
pub const MIN_BIGFLOAT_BITS: usize = 64;

/// Runtime backend selector, as it appears in configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Rational,
    BigFloat { bits: usize },
    F64,
}

impl Backend {
    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Rational)
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => f.write_str("rational"),
            Backend::BigFloat { bits } => write!(f, "bigfloat:{bits}"),
            Backend::F64 => f.write_str("f64"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Backend::Rational),
            "f64" => Ok(Backend::F64),
            _ => {
                let bits = s
                    .strip_prefix("bigfloat:")
                    .ok_or_else(|| Error::Parse(format!("unknown backend `{s}`")))?;
                let bits: usize = bits
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid precision in backend `{s}`")))?;
                if !(MIN_BIGFLOAT_BITS..=MAX_BIGFLOAT_BITS).contains(&bits) {
                    return Err(Error::Parse(format!(
                        "big-float precision must lie in [{MIN_BIGFLOAT_BITS}, {MAX_BIGFLOAT_BITS}] bits, got {bits}"
                    )));
                }
                Ok(Backend::BigFloat { bits })
            }
        }
    }
}

/// Upper bound on big-float precision accepted from configuration.
pub const MAX_BIGFLOAT_BITS: usize = 1 << 16;

/// Parses `"p/q"`, an integer, or a decimal literal (`"0.25"`, `"1e-3"`) into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    // A decimal literal expands to at most its digits plus the exponent bound,
    // so the "p/q" limit is larger and every parsed value re-parses after formatting.
    let limit = if s.contains('/') { 1 << 20 } else { 1 << 16 };
    if s.len() > limit {
        return Err(Error::Parse("rational literal too long".into()));
    }
    let bad = |what: &str| Error::Parse(format!("invalid rational `{s}`: {what}"));
    if let Some((num, den)) = s.split_once('/') {
        let int = |t: &str| -> Result<IBig> {
            let t = t.trim();
            let digits = t.strip_prefix(['+', '-']).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad("expected integers p/q"));
            }
            IBig::from_str(t).map_err(|e| bad(&e.to_string()))
        };
        let (num, den) = (int(num)?, int(den)?);
        if den == IBig::ZERO {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        let neg = den < IBig::ZERO;
        let q = RBig::from_parts(num, den.unsigned_abs());
        return Ok(if neg { -q } else { q });
    }
    // Plain decimal syntax only; the big-number parser also accepts radix
    // prefixes and `@` exponents, which would bypass the exponent bound.
    if !s.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'+' | b'-' | b'.' | b'e' | b'E')) {
        return Err(bad("unexpected character"));
    }
    if let Some(pos) = s.find(['e', 'E']) {
        let exp: i64 = s[pos + 1..]
            .parse()
            .map_err(|_| Error::Parse(format!("invalid exponent in `{s}`")))?;
        if exp.abs() > 4096 {
            return Err(Error::Parse(format!("exponent out of range in `{s}`")));
        }
    }
    let parsed = RBig::from_str_decimal(s);
    parsed.map_err(|e| Error::Parse(format!("invalid rational `{s}`: {e}")))
}

/// Formats a rational as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denominator() == &UBig::ONE {
        q.numerator().to_string()
    } else {
        format!("{}/{}", q.numerator(), q.denominator())
    }
}

pub fn rational_from_int(v: i64) -> Rational {
    RBig::from(v)
}

pub fn rational_ratio(p: i64, q: i64) -> Rational {
    RBig::from_parts_signed(IBig::from(p), IBig::from(q))
}

pub fn rational_is_integer(q: &Rational) -> bool {
    q.denominator() == &UBig::ONE
}

/// Exact square root of a rational if both numerator and denominator are
/// perfect squares.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q < &RBig::ZERO {
        return None;
    }
    let num = q.numerator().unsigned_abs();
    let den = q.denominator().clone();
    let rn = num.sqrt();
    let rd = den.sqrt();
    if &rn * &rn == num && &rd * &rd == den {
        Some(RBig::from_parts(IBig::from(rn), rd))
    } else {
        None
    }
}

/// Shortest round-trip decimal for a big float: the `f64` representation when it is
/// exact-enough and finite, otherwise a 20-significant-digit scientific string.
pub fn format_bigfloat(x: &BigFloat) -> String {
    let f = x.to_f64().value();
    if f.is_finite() && (f != 0.0 || x == &BigFloat::ZERO) && (f.abs() > 1e-300 || f == 0.0) {
        return format_f64(f);
    }
    let dec = x.clone().with_precision(80).value().to_decimal().value();
    let dec = dec.with_precision(20).value();
    let sig = dec.repr().significand();
    let digits = sig.unsigned_abs().to_string();
    let digits = digits.trim_end_matches('0');
    let trailing = sig.unsigned_abs().to_string().len() - digits.len();
    let exp = dec.repr().exponent() + trailing as isize + digits.len() as isize - 1;
    let sign = if sig.sign() == Sign::Negative { "-" } else { "" };
    let (head, tail) = digits.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

/// Shortest round-trip decimal representation of an `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        let s = serde_json::Number::from_f64(v)
            .map(|n| n.to_string())
            .unwrap_or_else(|| v.to_string());
        s
    } else {
        v.to_string()
    }
}

/// Scalar field used by every algorithm of the crate.
pub trait Real:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Per-value context needed to create constants (precision for big floats).
    type Ctx: Copy + fmt::Debug + PartialEq + Send + Sync + 'static;

    /// `true` when arithmetic is exact.
    const EXACT: bool;

    fn backend(ctx: Self::Ctx) -> Backend;
    fn ctx(&self) -> Self::Ctx;

    fn from_rational(q: &Rational, ctx: Self::Ctx) -> Self;
    fn from_f64(v: f64, ctx: Self::Ctx) -> Self;
    fn to_f64(&self) -> f64;
    fn to_bigfloat(&self, bits: usize) -> BigFloat;

    fn zero(ctx: Self::Ctx) -> Self {
        Self::from_f64(0.0, ctx)
    }
    fn one(ctx: Self::Ctx) -> Self {
        Self::from_f64(1.0, ctx)
    }
    fn from_usize(v: usize, ctx: Self::Ctx) -> Self {
        Self::from_rational(&RBig::from(v), ctx)
    }

    fn is_zero(&self) -> bool;
    /// `false` only for overflowed or NaN machine floats.
    fn is_finite(&self) -> bool {
        true
    }

    fn abs(&self) -> Self {
        if self < &Self::zero(self.ctx()) {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Square root; `None` for negative input or when the result is not
    /// representable (irrational value under the exact backend).
    fn sqrt(&self) -> Option<Self>;
    /// Exponential; `None` when the backend cannot represent it.
    fn exp(&self) -> Option<Self>;
    /// Natural logarithm of a positive value; `None` when unavailable.
    fn ln(&self) -> Option<Self>;

    /// JSON encoding: `"p/q"` strings for rationals, shortest decimals for floats.
    fn to_json(&self) -> Value;
    fn from_json(v: &Value, ctx: Self::Ctx) -> Result<Self>;
    /// Text form used in CSV output.
    fn to_text(&self) -> String;
}

impl Real for f64 {
    type Ctx = ();
    const EXACT: bool = false;

    fn backend(_: ()) -> Backend {
        Backend::F64
    }
    fn ctx(&self) {}
    fn from_rational(q: &Rational, _: ()) -> Self {
        q.to_f64().value()
    }
    fn from_f64(v: f64, _: ()) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_bigfloat(&self, bits: usize) -> BigFloat {
        BigFloat::try_from(*self)
            .unwrap_or(BigFloat::ZERO)
            .with_precision(bits)
            .value()
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }
    fn exp(&self) -> Option<Self> {
        Some(f64::exp(*self))
    }
    fn ln(&self) -> Option<Self> {
        (*self > 0.0).then(|| f64::ln(*self))
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
    fn from_json(v: &Value, _: ()) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("number {n} not representable"))),
            Value::String(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid float `{s}`"))),
            other => Err(Error::Parse(format!("expected a number, got {other}"))),
        }
    }
    fn to_text(&self) -> String {
        format_f64(*self)
    }
}

impl Real for Rational {
    type Ctx = ();
    const EXACT: bool = true;

    fn backend(_: ()) -> Backend {
        Backend::Rational
    }
    fn ctx(&self) {}
    fn from_rational(q: &Rational, _: ()) -> Self {
        q.clone()
    }
    fn from_f64(v: f64, _: ()) -> Self {
        RBig::try_from(v).unwrap_or(RBig::ZERO)
    }
    fn from_usize(v: usize, _: ()) -> Self {
        RBig::from(v)
    }
    fn zero(_: ()) -> Self {
        RBig::ZERO
    }
    fn one(_: ()) -> Self {
        RBig::ONE
    }
    fn to_f64(&self) -> f64 {
        RBig::to_f64(self).value()
    }
    fn to_bigfloat(&self, bits: usize) -> BigFloat {
        self.to_float::<HalfEven, 2>(bits).value()
    }
    fn is_zero(&self) -> bool {
        self == &RBig::ZERO
    }
    fn sqrt(&self) -> Option<Self> {
        rational_sqrt(self)
    }
    fn exp(&self) -> Option<Self> {
        self.is_zero().then_some(RBig::ONE)
    }
    fn ln(&self) -> Option<Self> {
        (self == &RBig::ONE).then_some(RBig::ZERO)
    }
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
    fn from_json(v: &Value, _: ()) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(Error::Parse(format!("expected a rational, got {other}"))),
        }
    }
    fn to_text(&self) -> String {
        format_rational(self)
    }
}

impl Real for BigFloat {
    /// Working precision in bits.
    type Ctx = usize;
    const EXACT: bool = false;

    fn backend(bits: usize) -> Backend {
        Backend::BigFloat { bits }
    }
    fn ctx(&self) -> usize {
        self.precision()
    }
    fn from_rational(q: &Rational, bits: usize) -> Self {
        q.to_float::<HalfEven, 2>(bits).value()
    }
    fn from_f64(v: f64, bits: usize) -> Self {
        v.to_bigfloat(bits)
    }
    fn from_usize(v: usize, bits: usize) -> Self {
        BigFloat::from(v).with_precision(bits).value()
    }
    fn to_f64(&self) -> f64 {
        FBig::to_f64(self).value()
    }
    fn to_bigfloat(&self, bits: usize) -> BigFloat {
        self.clone().with_precision(bits).value()
    }
    fn is_zero(&self) -> bool {
        self.repr().significand().is_zero()
    }
    fn sqrt(&self) -> Option<Self> {
        if self.repr().sign() == dashu_base::Sign::Negative && !self.is_zero() {
            None
        } else {
            Some(FBig::sqrt(self).with_precision(self.precision()).value())
        }
    }
    fn exp(&self) -> Option<Self> {
        // Exact results such as exp(0) come back with unlimited precision.
        Some(FBig::exp(self).with_precision(self.precision()).value())
    }
    fn ln(&self) -> Option<Self> {
        (self.repr().sign() == dashu_base::Sign::Positive && !self.is_zero())
            .then(|| FBig::ln(self).with_precision(self.precision()).value())
    }
    fn to_json(&self) -> Value {
        Value::String(self.to_text())
    }
    fn from_json(v: &Value, bits: usize) -> Result<Self> {
        let q = <Rational as Real>::from_json(v, ())?;
        Ok(Self::from_rational(&q, bits))
    }
    fn to_text(&self) -> String {
        // Enough decimal digits to round-trip the working precision.
        let digits = (self.precision() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        if self.is_zero() {
            return "0".into();
        }
        self.clone()
            .with_precision(self.precision() + 8)
            .value()
            .to_decimal()
            .value()
            .with_precision(digits)
            .value()
            .to_string()
    }
}

/// `base^exp` by repeated squaring.
pub fn powi<T: Real>(base: &T, mut exp: usize) -> T {
    let mut acc = T::one(base.ctx());
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b.clone();
        }
        exp >>= 1;
        if exp > 0 {
            b = b.clone() * b;
        }
    }
    acc
}

/// Largest absolute value, or zero for an empty slice.
pub fn max_abs<T: Real>(values: &[T], ctx: T::Ctx) -> T {
    values.iter().fold(T::zero(ctx), |m, v| {
        let a = v.abs();
        if a > m {
            a
        } else {
            m
        }
    })
}

/// Sum of squares.
pub fn norm_sq<T: Real>(values: &[T], ctx: T::Ctx) -> T {
    values
        .iter()
        .fold(T::zero(ctx), |acc, v| acc + v.clone() * v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backend_round_trip() {
        for s in ["rational", "f64", "bigfloat:512", "bigfloat:64"] {
            let b: Backend = s.parse().unwrap();
            assert_eq!(b.to_string(), s);
        }
        assert!("bigfloat:32".parse::<Backend>().is_err());
        assert!("bigfloat:".parse::<Backend>().is_err());
        assert!("double".parse::<Backend>().is_err());
    }

    #[test]
    fn huge_big_floats_print_in_scientific_form() {
        // exp(2000) overflows f64.
        let x = Real::exp(&<BigFloat as Real>::from_f64(2000.0, 128)).unwrap();
        let s = format_bigfloat(&x);
        assert!(s.starts_with("3.88118019428436857"), "{s}");
        assert!(s.ends_with("e868"), "{s}");
        let tiny = -(BigFloat::ONE.with_precision(64).value() / x);
        let t = format_bigfloat(&tiny);
        assert!(t.starts_with("-2.5765358729611496") && t.ends_with("e-869"), "{t}");
        assert_eq!(format_bigfloat(&<BigFloat as Real>::from_f64(0.5, 64)), "0.5");
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("1/2").unwrap(), rational_ratio(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rational_ratio(1, 4));
        assert_eq!(parse_rational("-3").unwrap(), rational_from_int(-3));
        assert_eq!(parse_rational("1/-2").unwrap(), rational_ratio(-1, 2));
        let tiny = parse_rational(&format!("1{}e-4000", "0".repeat(200))).unwrap();
        assert_eq!(parse_rational(&format_rational(&tiny)).unwrap(), tiny);
        for bad in ["1/-0", "1/+0", "1@1111111111111", "0x10", "1/0x2", "1/", "/2", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_rational("1e-2").unwrap(), rational_ratio(1, 100));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1e999999").is_err());
        assert_eq!(format_rational(&rational_ratio(-6, 4)), "-3/2");
        assert_eq!(format_rational(&rational_from_int(0)), "0");
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(rational_sqrt(&rational_ratio(9, 4)), Some(rational_ratio(3, 2)));
        assert_eq!(rational_sqrt(&rational_ratio(1, 3)), None);
        assert_eq!(rational_sqrt(&rational_ratio(-1, 4)), None);
        assert_eq!(<Rational as Real>::sqrt(&RBig::ZERO), Some(RBig::ZERO));
    }

    #[test]
    fn bigfloat_context_is_preserved() {
        let x = BigFloat::from_rational(&rational_ratio(1, 3), 256);
        assert_eq!(x.ctx(), 256);
        let y = x.clone() * BigFloat::from_usize(3, 256);
        assert!((Real::to_f64(&y) - 1.0).abs() < 1e-15);
        let s = <BigFloat as Real>::sqrt(&BigFloat::from_usize(2, 200)).unwrap();
        assert!((Real::to_f64(&s) - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(<BigFloat as Real>::sqrt(&BigFloat::from_f64(-1.0, 100)).is_none());
        let e = Real::exp(&BigFloat::from_usize(3042, 128)).unwrap();
        assert!(!Real::to_f64(&e).is_finite());
        let l = Real::ln(&e).unwrap();
        assert!((Real::to_f64(&l) - 3042.0).abs() < 1e-9);
    }

    #[test]
    fn json_scalars() {
        let q = rational_ratio(-7, 3);
        assert_eq!(q.to_json(), Value::String("-7/3".into()));
        assert_eq!(<Rational as Real>::from_json(&q.to_json(), ()).unwrap(), q);
        assert_eq!(<f64 as Real>::from_json(&0.1f64.to_json(), ()).unwrap(), 0.1);
        assert_eq!(format_f64(0.1), "0.1");
        let b = BigFloat::from_rational(&rational_ratio(1, 3), 128);
        let back = <BigFloat as Real>::from_json(&b.to_json(), 128).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn powers() {
        assert_eq!(powi(&rational_ratio(1, 2), 3), rational_ratio(1, 8));
        assert_eq!(powi(&3.0f64, 0), 1.0);
    }
}
