//! Exact rational numbers.
//!
//! Every length, time and position in the simulator is a [`Rational`]. Values
//! are stored reduced with a positive denominator, so structural equality is
//! value equality and canonical keys can be built from the raw fields.
//!
//! Arithmetic is checked 128-bit. The `checked_*` methods report overflow as
//! an error; the operator impls panic on overflow rather than wrap.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow in rational arithmetic")]
    Overflow,
    #[error("gcd of an empty set")]
    EmptySet,
    #[error("gcd requires positive values, got {0}")]
    NonPositive(Rational),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// A reduced fraction `num / den` with `den > 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

pub(crate) fn gcd_u(mut a: u128, mut b: u128) -> u128 {
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        return gcd_small(a as u64, b as u64) as u128;
    }
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Binary gcd; avoids 128-bit division on the common small case.
fn gcd_small(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_i(a: i128, b: i128) -> i128 {
    // Both inputs are bounded by i128::MAX in magnitude except i128::MIN, which
    // `new` rejects before getting here.
    gcd_u(a.unsigned_abs(), b.unsigned_abs()) as i128
}

fn lcm_i(a: i128, b: i128) -> Result<i128, RationalError> {
    let g = gcd_i(a, b);
    (a / g).checked_mul(b).ok_or(RationalError::Overflow)
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Builds `num / den` in reduced form.
    pub fn new(num: i128, den: i128) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        if num == i128::MIN || den == i128::MIN {
            return Err(RationalError::Overflow);
        }
        if num == 0 {
            return Ok(Self::ZERO);
        }
        let (mut num, mut den) = match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) if n != i64::MIN && d != i64::MIN => {
                let g = gcd_small(n.unsigned_abs(), d.unsigned_abs()) as i64;
                ((n / g) as i128, (d / g) as i128)
            }
            _ => {
                let g = gcd_i(num, den);
                (num / g, den / g)
            }
        };
        if den < 0 {
            num = -num;
            den = -den;
        }
        Ok(Rational { num, den })
    }

    pub const fn from_integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub const fn numer(&self) -> i128 {
        self.num
    }

    pub const fn denom(&self) -> i128 {
        self.den
    }

    pub const fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub const fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub const fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub const fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self, RationalError> {
        if self.den == rhs.den {
            let n = self
                .num
                .checked_add(rhs.num)
                .ok_or(RationalError::Overflow)?;
            return if self.den == 1 {
                Ok(Rational::from_integer(n))
            } else {
                Rational::new(n, self.den)
            };
        }
        let g = gcd_i(self.den, rhs.den);
        let l = (self.den / g)
            .checked_mul(rhs.den)
            .ok_or(RationalError::Overflow)?;
        let a = self
            .num
            .checked_mul(l / self.den)
            .ok_or(RationalError::Overflow)?;
        let b = rhs
            .num
            .checked_mul(l / rhs.den)
            .ok_or(RationalError::Overflow)?;
        Rational::new(a.checked_add(b).ok_or(RationalError::Overflow)?, l)
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self, RationalError> {
        self.checked_add(-rhs)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self, RationalError> {
        // Cross-reduce first to keep intermediates small.
        let g1 = gcd_i(self.num, rhs.den).max(1);
        let g2 = gcd_i(rhs.num, self.den).max(1);
        let n = (self.num / g1)
            .checked_mul(rhs.num / g2)
            .ok_or(RationalError::Overflow)?;
        let d = (self.den / g2)
            .checked_mul(rhs.den / g1)
            .ok_or(RationalError::Overflow)?;
        Rational::new(n, d)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, RationalError> {
        if rhs.is_zero() {
            return Err(RationalError::DivisionByZero);
        }
        self.checked_mul(rhs.recip_unchecked())
    }

    fn recip_unchecked(self) -> Self {
        if self.num < 0 {
            Rational {
                num: -self.den,
                den: -self.num,
            }
        } else {
            Rational {
                num: self.den,
                den: self.num,
            }
        }
    }

    pub fn checked_cmp(&self, other: &Self) -> Result<Ordering, RationalError> {
        if self.den == other.den {
            return Ok(self.num.cmp(&other.num));
        }
        let l = self
            .num
            .checked_mul(other.den)
            .ok_or(RationalError::Overflow)?;
        let r = other
            .num
            .checked_mul(self.den)
            .ok_or(RationalError::Overflow)?;
        Ok(l.cmp(&r))
    }

    pub fn abs(self) -> Self {
        Rational {
            num: self.num.abs(),
            den: self.den,
        }
    }

    /// Largest integer `<= self`.
    pub fn floor(self) -> i128 {
        self.num.div_euclid(self.den)
    }

    /// Smallest integer `>= self`.
    pub fn ceil(self) -> i128 {
        -(-self.num).div_euclid(self.den)
    }

    /// True when `self / unit` is an integer. `unit` must be nonzero.
    pub fn is_multiple_of(self, unit: Rational) -> bool {
        (self / unit).is_integer()
    }

    /// `self mod unit` in `[0, unit)`.
    pub fn rem_euclid(self, unit: Rational) -> Rational {
        let q = (self / unit).floor();
        self - unit * Rational::from_integer(q)
    }

    /// Largest `g` such that every value is an integer multiple of `g`.
    pub fn gcd_set<I>(values: I) -> Result<Rational, RationalError>
    where
        I: IntoIterator<Item = Rational>,
    {
        // gcd(a/b, c/d) = gcd(a*d', c*b') / lcm(b, d) after bringing both to the
        // common denominator; folding pairwise keeps numbers small.
        let mut acc: Option<Rational> = None;
        for v in values {
            if !v.is_positive() {
                return Err(RationalError::NonPositive(v));
            }
            acc = Some(match acc {
                None => v,
                Some(a) => {
                    let l = lcm_i(a.den, v.den)?;
                    let an = a
                        .num
                        .checked_mul(l / a.den)
                        .ok_or(RationalError::Overflow)?;
                    let vn = v
                        .num
                        .checked_mul(l / v.den)
                        .ok_or(RationalError::Overflow)?;
                    Rational::new(gcd_i(an, vn), l)?
                }
            });
        }
        acc.ok_or(RationalError::EmptySet)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.checked_cmp(other)
            .expect("rational comparison overflow")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                match self.$checked(rhs) {
                    Ok(r) => r,
                    Err(e) => panic!("{}({}, {}): {}", stringify!($method), self, rhs, e),
                }
            }
        }
    };
}

panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);
panicking_op!(Div, div, checked_div);

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    /// Accepts `"p/q"` or `"n"`, base 10, optional leading minus on the numerator.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RationalError::Parse(s.to_string());
        let int = |t: &str| -> Result<i128, RationalError> {
            let digits = t.strip_prefix('-').unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<i128>().map_err(|_| bad())
        };
        match s.split_once('/') {
            None => Ok(Rational::from_integer(int(s)?)),
            Some((n, d)) => {
                if d.starts_with('-') {
                    return Err(bad());
                }
                Rational::new(int(n)?, int(d)?)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
