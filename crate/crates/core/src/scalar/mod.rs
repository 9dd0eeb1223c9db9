//! Real-number backends, precision modes and tolerance policy.
//!
//! All expansion, orbit and coefficient code is generic over [`Real`], with
//! three backends:
//!
//! | mode      | type          | notes                                      |
//! |-----------|---------------|--------------------------------------------|
//! | hardware  | `f64`         | fast path                                  |
//! | extended  | [`BigFloat`]  | runtime mantissa width, default 128 bits   |
//! | exact     | `BigRational` | test oracle; comparisons need no tolerance |

mod bigfloat;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use bigfloat::{BigFloat, MIN_PRECISION};

use crate::error::{Error, Result};

/// Default mantissa width of the extended mode.
pub const DEFAULT_EXTENDED_BITS: u32 = 128;

pub trait Real:
    Clone
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whatever is needed to build constants compatible with a value
    /// (the mantissa width for [`BigFloat`]).
    type Ctx: Clone + fmt::Debug + Send + Sync;

    /// Arithmetic is exact and comparisons are decidable.
    const EXACT: bool;

    fn context(&self) -> Self::Ctx;
    fn from_f64_in(x: f64, ctx: &Self::Ctx) -> Self;
    fn from_u64_in(n: u64, ctx: &Self::Ctx) -> Self;
    fn from_ratio_in(r: &BigRational, ctx: &Self::Ctx) -> Self;
    fn to_f64(&self) -> f64;
    /// `floor(self)` for a nonnegative value; `None` past `u64::MAX`.
    fn floor_u64(&self) -> Option<u64>;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    /// Approximate `log2 |self|`, `-inf` at zero.
    fn log2_abs(&self) -> f64;

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn zero_like(&self) -> Self {
        Self::from_u64_in(0, &self.context())
    }

    fn one_like(&self) -> Self {
        Self::from_u64_in(1, &self.context())
    }

    fn lift_u64(&self, n: u64) -> Self {
        Self::from_u64_in(n, &self.context())
    }

    fn lift_f64(&self, x: f64) -> Self {
        Self::from_f64_in(x, &self.context())
    }
}

impl Real for f64 {
    type Ctx = ();
    const EXACT: bool = false;

    fn context(&self) {}
    fn from_f64_in(x: f64, _: &()) -> Self {
        x
    }
    fn from_u64_in(n: u64, _: &()) -> Self {
        n as f64
    }
    fn from_ratio_in(r: &BigRational, _: &()) -> Self {
        ratio_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn floor_u64(&self) -> Option<u64> {
        let f = self.floor();
        (0.0..18_446_744_073_709_551_616.0)
            .contains(&f)
            .then_some(f as u64)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn log2_abs(&self) -> f64 {
        f64::abs(*self).log2()
    }
}

impl Real for BigFloat {
    type Ctx = u32;
    const EXACT: bool = false;

    fn context(&self) -> u32 {
        self.precision()
    }
    fn from_f64_in(x: f64, prec: &u32) -> Self {
        BigFloat::from_f64(x, *prec)
    }
    fn from_u64_in(n: u64, prec: &u32) -> Self {
        BigFloat::from_u64(n, *prec)
    }
    fn from_ratio_in(r: &BigRational, prec: &u32) -> Self {
        BigFloat::from_ratio(r, *prec)
    }
    fn to_f64(&self) -> f64 {
        BigFloat::to_f64(self)
    }
    fn floor_u64(&self) -> Option<u64> {
        self.floor().to_u64()
    }
    fn is_zero(&self) -> bool {
        BigFloat::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        BigFloat::is_negative(self)
    }
    fn log2_abs(&self) -> f64 {
        BigFloat::log2_abs(self)
    }
    fn abs(&self) -> Self {
        BigFloat::abs(self)
    }
}

impl Real for BigRational {
    type Ctx = ();
    const EXACT: bool = true;

    fn context(&self) {}
    fn from_f64_in(x: f64, _: &()) -> Self {
        BigRational::from_float(x).expect("finite f64")
    }
    fn from_u64_in(n: u64, _: &()) -> Self {
        BigRational::from_integer(n.into())
    }
    fn from_ratio_in(r: &BigRational, _: &()) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn floor_u64(&self) -> Option<u64> {
        self.floor().to_integer().to_u64()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn log2_abs(&self) -> f64 {
        if Zero::is_zero(self) {
            return f64::NEG_INFINITY;
        }
        let prec = 64;
        BigFloat::from_ratio(self, prec).log2_abs()
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r)
        .filter(|v| v.is_finite())
        .unwrap_or_else(|| BigFloat::from_ratio(r, 64).to_f64())
}

/// Arithmetic backend selected at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PrecisionMode {
    Hardware,
    Extended { bits: u32 },
    Exact,
}

impl PrecisionMode {
    pub fn extended() -> Self {
        PrecisionMode::Extended {
            bits: DEFAULT_EXTENDED_BITS,
        }
    }
}

impl fmt::Display for PrecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecisionMode::Hardware => f.write_str("hw"),
            PrecisionMode::Extended { bits } => write!(f, "ext({bits})"),
            PrecisionMode::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TolerancePolicy {
    /// Absolute comparison tolerance.
    pub eps_compare: f64,
    /// Relative window in which digit extraction snaps up to the next integer.
    pub eps_snap: f64,
    /// Dead zone around region boundaries.
    pub eps_boundary: f64,
}

impl TolerancePolicy {
    pub fn hardware() -> Self {
        TolerancePolicy {
            eps_compare: 1e-9,
            eps_snap: 1e-12,
            eps_boundary: 1e-9,
        }
    }

    pub fn extended() -> Self {
        TolerancePolicy {
            eps_compare: 1e-25,
            ..Self::hardware()
        }
    }

    pub fn for_mode(mode: PrecisionMode) -> Self {
        match mode {
            PrecisionMode::Extended { .. } => Self::extended(),
            PrecisionMode::Hardware | PrecisionMode::Exact => Self::hardware(),
        }
    }

    /// Comparison and snapping tolerances must be positive. The boundary
    /// margin may be zero, in which case only exact ties are boundary.
    pub fn validate(&self) -> Result<()> {
        for (name, v, allow_zero) in [
            ("eps_compare", self.eps_compare, false),
            ("eps_snap", self.eps_snap, false),
            ("eps_boundary", self.eps_boundary, true),
        ] {
            let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
            if !ok {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be {} and finite, got {v}",
                    if allow_zero {
                        "non-negative"
                    } else {
                        "positive"
                    }
                )));
            }
        }
        Ok(())
    }
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self::hardware()
    }
}

/// Integer part used for digit extraction.
///
/// Values within `eps_snap * max(1, |t|)` below an integer snap up to it, and
/// values within the same window below zero give 0. The exact backend always
/// returns the true floor.
pub fn snap_floor<R: Real>(t: &R, policy: &TolerancePolicy) -> Result<u64> {
    if R::EXACT {
        if t.is_negative() {
            return Err(Error::NegativeDigitArgument(t.to_f64()));
        }
        return t.floor_u64().ok_or(Error::DigitOverflow);
    }
    let tf = t.to_f64();
    let window = policy.eps_snap * tf.abs().max(1.0);
    if tf < 0.0 {
        return if -tf <= window {
            Ok(0)
        } else {
            Err(Error::NegativeDigitArgument(tf))
        };
    }
    let floor = t.floor_u64().ok_or(Error::DigitOverflow)?;
    let frac = (t.clone() - t.lift_u64(floor)).to_f64();
    if 1.0 - frac <= window {
        floor.checked_add(1).ok_or(Error::DigitOverflow)
    } else {
        Ok(floor)
    }
}

/// A user-supplied real input: a decimal float or an exact `num/den`.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Float(f64),
    Ratio(BigRational),
}

impl Number {
    pub fn ratio(num: i64, den: i64) -> Self {
        Number::Ratio(BigRational::new(num.into(), den.into()))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Float(x) => *x,
            Number::Ratio(r) => ratio_to_f64(r),
        }
    }

    /// Exact rational value; floats convert to the rational they encode.
    pub fn to_ratio(&self) -> BigRational {
        match self {
            Number::Float(x) => BigRational::from_float(*x).expect("finite input"),
            Number::Ratio(r) => r.clone(),
        }
    }

    /// `true` if the value survives conversion to `f64` unchanged.
    pub fn is_f64_exact(&self) -> bool {
        match self {
            Number::Float(_) => true,
            Number::Ratio(r) => BigRational::from_float(ratio_to_f64(r)).as_ref() == Some(r),
        }
    }

    pub fn to_real<R: Real>(&self, ctx: &R::Ctx) -> R {
        match self {
            Number::Float(x) => R::from_f64_in(*x, ctx),
            Number::Ratio(r) => R::from_ratio_in(r, ctx),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Number::Float(x) => *x > 0.0,
            Number::Ratio(r) => r.is_positive(),
        }
    }

    pub fn in_unit_interval(&self) -> bool {
        match self {
            Number::Float(x) => *x > 0.0 && *x < 1.0,
            Number::Ratio(r) => r.is_positive() && *r < BigRational::one(),
        }
    }
}

impl From<f64> for Number {
    fn from(x: f64) -> Self {
        Number::Float(x)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Float(x) => write!(f, "{x}"),
            Number::Ratio(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for Number {
    type Err = Error;

    /// `"3/7"` and `"2"` parse as exact rationals, anything else as `f64`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Number::Ratio(BigRational::new(n, d)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Number::Ratio(BigRational::from_integer(n)));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(bad());
        }
        Ok(Number::Float(x))
    }
}
