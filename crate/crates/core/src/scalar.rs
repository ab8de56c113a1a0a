//! Exact dyadic rationals.
//!
//! Every coordinate, radius and distance in this crate is a number of the form
//! `numerator / 2^log2_den`. Addition, subtraction, multiplication, halving and
//! comparison are exact, so no tolerance appears anywhere downstream.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A dyadic rational in canonical form: the numerator is odd unless the
/// exponent is zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    num: i128,
    log2_den: u32,
}

impl Scalar {
    pub const ZERO: Scalar = Scalar { num: 0, log2_den: 0 };
    pub const ONE: Scalar = Scalar { num: 1, log2_den: 0 };

    pub fn new(num: i128, log2_den: u32) -> Self {
        Scalar { num, log2_den }.normalized()
    }

    pub const fn int(n: i128) -> Self {
        Scalar { num: n, log2_den: 0 }
    }

    /// `2^e` for a non-negative exponent.
    pub fn pow2(e: u32) -> Self {
        Scalar::int(1i128 << e)
    }

    /// `1 / 2^e`.
    pub fn inv_pow2(e: u32) -> Self {
        Scalar::new(1, e)
    }

    pub fn numerator(self) -> i128 {
        self.num
    }

    pub fn log2_denominator(self) -> u32 {
        self.log2_den
    }

    fn normalized(mut self) -> Self {
        if self.num == 0 {
            self.log2_den = 0;
            return self;
        }
        let tz = self.num.trailing_zeros().min(self.log2_den);
        self.num >>= tz;
        self.log2_den -= tz;
        self
    }

    /// Numerator rescaled to denominator `2^e` (requires `e >= log2_den`).
    fn scaled_num(self, e: u32) -> i128 {
        let shift = e - self.log2_den;
        let out = self.num.checked_shl(shift).expect("dyadic overflow");
        assert!(out >> shift == self.num, "dyadic overflow");
        out
    }

    fn aligned(self, other: Scalar) -> (i128, i128, u32) {
        let e = self.log2_den.max(other.log2_den);
        (self.scaled_num(e), other.scaled_num(e), e)
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }

    pub fn is_positive(self) -> bool {
        self.num > 0
    }

    pub fn is_integer(self) -> bool {
        self.log2_den == 0
    }

    pub fn abs(self) -> Self {
        Scalar { num: self.num.abs(), log2_den: self.log2_den }
    }

    pub fn half(self) -> Self {
        Scalar::new(self.num, self.log2_den + 1)
    }

    /// Multiply by `2^e` (`e` may be negative).
    pub fn shift(self, e: i32) -> Self {
        if e >= 0 {
            self * Scalar::pow2(e as u32)
        } else {
            Scalar::new(self.num, self.log2_den + (-e) as u32)
        }
    }

    /// `Some(e)` when the value is exactly `2^e` for some integer `e`.
    pub fn log2_exact(self) -> Option<i32> {
        if self.num <= 0 || self.num.count_ones() != 1 {
            return None;
        }
        Some(self.num.trailing_zeros() as i32 - self.log2_den as i32)
    }

    /// `floor(self / step)` for a positive step.
    pub fn div_floor(self, step: Scalar) -> i128 {
        assert!(step.is_positive(), "division by non-positive step");
        let (a, b, _) = self.aligned(step);
        a.div_euclid(b)
    }

    /// `ceil(self / step)` for a positive step.
    pub fn div_ceil(self, step: Scalar) -> i128 {
        -((-self).div_floor(step))
    }

    /// True when `self` is an integer multiple of `step`.
    pub fn is_multiple_of(self, step: Scalar) -> bool {
        assert!(step.is_positive(), "multiple of non-positive step");
        let (a, b, _) = self.aligned(step);
        a.rem_euclid(b) == 0
    }

    pub fn mul_int(self, k: i128) -> Self {
        Scalar::new(self.num.checked_mul(k).expect("dyadic overflow"), self.log2_den)
    }

    /// Largest dyadic power of two `2^e` (e may be negative) dividing `self`;
    /// `None` for zero.
    pub fn largest_pow2_divisor(self) -> Option<i32> {
        if self.num == 0 {
            return None;
        }
        Some(self.num.trailing_zeros() as i32 - self.log2_den as i32)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (2f64).powi(self.log2_den as i32)
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        let (a, b, e) = self.aligned(rhs);
        Scalar::new(a.checked_add(b).expect("dyadic overflow"), e)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self + (-rhs)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: -self.num, log2_den: self.log2_den }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar::new(
            self.num.checked_mul(rhs.num).expect("dyadic overflow"),
            self.log2_den + rhs.log2_den,
        )
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::int(v as i128)
    }
}

impl From<i32> for Scalar {
    fn from(v: i32) -> Self {
        Scalar::int(v as i128)
    }
}

impl From<u32> for Scalar {
    fn from(v: u32) -> Self {
        Scalar::int(v as i128)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1i128 << self.log2_den)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `"7"`, `"-3/4"` (power-of-two denominator) and finite binary
    /// decimals such as `"0.375"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let num: i128 = n.trim().parse().map_err(|_| bad())?;
            let den: i128 = d.trim().parse().map_err(|_| bad())?;
            if den <= 0 || den.count_ones() != 1 {
                return Err(bad());
            }
            return Ok(Scalar::new(num, den.trailing_zeros()));
        }
        if let Some((ip, fp)) = s.split_once('.') {
            let neg = ip.starts_with('-');
            let digits = fp.len() as u32;
            if digits == 0 || digits > 30 || !fp.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let whole: i128 = format!("{ip}{fp}").parse().map_err(|_| bad())?;
            let whole = if neg && whole > 0 { -whole } else { whole };
            // whole / 10^digits = whole / (2^digits 5^digits)
            let five = 5i128.pow(digits);
            if whole % five != 0 {
                return Err(bad());
            }
            return Ok(Scalar::new(whole / five, digits));
        }
        s.parse::<i128>().map(Scalar::int).map_err(|_| bad())
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> de::Visitor<'de> for V {
            type Value = Scalar;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a dyadic rational string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::from(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::int(v as i128))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
                // only exact binary fractions are accepted
                let mut e = 0u32;
                let mut x = v;
                while x.fract() != 0.0 && e < 60 {
                    x *= 2.0;
                    e += 1;
                }
                if x.fract() != 0.0 || x.abs() > 1e30 {
                    return Err(E::custom(format!("{v} is not an exact dyadic rational")));
                }
                Ok(Scalar::new(x as i128, e))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
                v.parse().map_err(E::custom)
            }
        }
        de.deserialize_any(V)
    }
}

pub fn max(a: Scalar, b: Scalar) -> Scalar {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn min(a: Scalar, b: Scalar) -> Scalar {
    if a <= b {
        a
    } else {
        b
    }
}
