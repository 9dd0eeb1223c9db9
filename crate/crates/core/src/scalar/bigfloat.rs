//! Binary floating point with a runtime-selected mantissa width.
//!
//! A value is `mant * 2^exp` where `|mant|` has exactly `prec` significant
//! bits (or is zero). Every operation rounds its exact result to nearest,
//! ties to even, at the larger of the operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Smallest mantissa width accepted by [`BigFloat`].
pub const MIN_PRECISION: u32 = 8;

#[derive(Clone)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
            prec: prec.max(MIN_PRECISION),
        }
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(
            x.is_finite(),
            "BigFloat::from_f64 needs a finite value, got {x}"
        );
        if x == 0.0 {
            return Self::zero(prec);
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let mut mant = BigInt::from(m);
        if negative {
            mant = -mant;
        }
        Self::round(mant, e, prec, false)
    }

    pub fn from_bigint(n: BigInt, prec: u32) -> Self {
        Self::round(n, 0, prec, false)
    }

    pub fn from_u64(n: u64, prec: u32) -> Self {
        Self::round(BigInt::from(n), 0, prec, false)
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> Self {
        let num = Self::round(r.numer().clone(), 0, prec + 2, false);
        let den = Self::round(r.denom().clone(), 0, prec + 2, false);
        (num / den).with_precision(prec)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Rounds (or exactly widens) to a new mantissa width.
    pub fn with_precision(&self, prec: u32) -> Self {
        Self::round(self.mant.clone(), self.exp, prec, false)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Exact rational value.
    pub fn to_ratio(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::from(1) << (-self.exp) as u64)
        }
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.mant << self.exp as u64;
        }
        let shift = (-self.exp) as u64;
        let mag = self.mant.magnitude();
        let q = mag >> shift;
        if self.is_negative() {
            let exact = mag.trailing_zeros().is_none_or(|tz| tz >= shift);
            let q = BigInt::from_biguint(Sign::Minus, q);
            if exact {
                q
            } else {
                q - 1
            }
        } else {
            BigInt::from_biguint(Sign::Plus, q)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let mag = self.mant.magnitude();
        let bits = mag.bits();
        let (top, shift) = if bits > 64 {
            let s = bits - 64;
            // keep a sticky bit so the u64 -> f64 conversion rounds correctly
            let sticky = mag.trailing_zeros().is_some_and(|tz| tz < s);
            ((mag >> s).to_u64().unwrap() | sticky as u64, s as i64)
        } else {
            (mag.to_u64().unwrap(), 0)
        };
        let v = ldexp(top as f64, self.exp + shift);
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Approximate `log2 |self|`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.mant.is_zero() {
            return f64::NEG_INFINITY;
        }
        let mag = self.mant.magnitude();
        let bits = mag.bits();
        let top = if bits > 53 {
            (mag >> (bits - 53)).to_u64().unwrap() as f64 / (1u64 << 52) as f64
        } else {
            mag.to_u64().unwrap() as f64 / 2f64.powi(bits as i32 - 1)
        };
        top.log2() + (self.exp + bits as i64 - 1) as f64
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative BigFloat");
        if self.mant.is_zero() {
            return self.clone();
        }
        let prec = self.prec;
        let mag = self.mant.magnitude();
        let bits = mag.bits() as i64;
        let mut shift = (2 * prec as i64 + 4 - bits).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let radicand: BigUint = mag << shift as u64;
        let root = radicand.sqrt();
        let sticky = &root * &root != radicand;
        Self::round(
            BigInt::from_biguint(Sign::Plus, root),
            (self.exp - shift) / 2,
            prec,
            sticky,
        )
    }

    fn top(&self) -> i64 {
        self.exp + self.mant.magnitude().bits() as i64
    }

    /// Rounds `mant * 2^exp` to `prec` bits. `sticky` marks a nonzero tail
    /// below the lowest bit of `mant`.
    fn round(mant: BigInt, exp: i64, prec: u32, sticky: bool) -> Self {
        let prec = prec.max(MIN_PRECISION);
        if mant.is_zero() {
            return Self::zero(prec);
        }
        let (sign, mut mag) = mant.into_parts();
        let bits = mag.bits();
        let mut exp = exp;
        let p = prec as u64;
        if bits > p {
            let shift = bits - p;
            let half = mag.bit(shift - 1);
            let below_half = mag.trailing_zeros().is_some_and(|tz| tz < shift - 1) || sticky;
            mag >>= shift;
            exp += shift as i64;
            if half && (below_half || mag.bit(0)) {
                mag += 1u32;
                if mag.bits() > p {
                    mag >>= 1u32;
                    exp += 1;
                }
            }
        } else if bits < p {
            let shift = p - bits;
            mag <<= shift;
            exp -= shift as i64;
        }
        BigFloat {
            mant: BigInt::from_biguint(sign, mag),
            exp,
            prec,
        }
    }

    fn add_impl(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if other.mant.is_zero() {
            return self.with_precision(prec);
        }
        if self.mant.is_zero() {
            return other.with_precision(prec);
        }
        let (big, small) = if self.top() >= other.top() {
            (self, other)
        } else {
            (other, self)
        };
        if big.top() - small.top() > prec as i64 + 4 {
            // `small` sits entirely below the rounding position of `big`
            let s = (prec as i64 + 3 - big.mant.magnitude().bits() as i64).max(3) as u64;
            let unit = if small.is_negative() {
                BigInt::from(-1)
            } else {
                BigInt::from(1)
            };
            return Self::round((&big.mant << s) + unit, big.exp - s as i64, prec, false);
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shifted = &hi.mant << (hi.exp - lo.exp) as u64;
        Self::round(shifted + &lo.mant, lo.exp, prec, false)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        Self::round(&self.mant * &other.mant, self.exp + other.exp, prec, false)
    }

    fn div_impl(&self, other: &Self) -> Self {
        assert!(!other.mant.is_zero(), "BigFloat division by zero");
        let prec = self.prec.max(other.prec);
        if self.mant.is_zero() {
            return Self::zero(prec);
        }
        let a_bits = self.mant.magnitude().bits() as i64;
        let b_bits = other.mant.magnitude().bits() as i64;
        let shift = (prec as i64 + 2 + b_bits - a_bits).max(0) as u64;
        let num = &self.mant << shift;
        let (q, r) = num.div_rem(&other.mant);
        Self::round(q, self.exp - shift as i64 - other.exp, prec, !r.is_zero())
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BigFloat {}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let mag_order = match self.top().cmp(&other.top()) {
            Ordering::Equal => {
                let (a, b) = (self.mant.magnitude(), other.mant.magnitude());
                if self.exp >= other.exp {
                    (a << (self.exp - other.exp) as u64).cmp(b)
                } else {
                    a.cmp(&(b << (other.exp - self.exp) as u64))
                }
            }
            o => o,
        };
        if sa == Sign::Minus {
            mag_order.reverse()
        } else {
            mag_order
        }
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({:e}, {} bits)", self.to_f64(), self.prec)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat {
            mant: -self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                self.$imp(&rhs)
            }
        }
        impl<'a> $tr<&'a BigFloat> for &'a BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &'a BigFloat) -> BigFloat {
                self.$imp(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_impl);
forward_binop!(Mul, mul, mul_impl);
forward_binop!(Div, div, div_impl);

impl Sub for BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: BigFloat) -> BigFloat {
        self.add_impl(&-rhs)
    }
}

impl<'a> Sub<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &'a BigFloat) -> BigFloat {
        self.add_impl(&-rhs.clone())
    }
}
