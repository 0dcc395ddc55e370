//! Exact rational scalars.
//!
//! Values that fit in a pair of machine words stay inline; everything else
//! falls back to [`BigRational`]. The representation is canonical (reduced,
//! positive denominator, inline whenever possible), so equality and hashing
//! are structural.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseScalarError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}` in rational literal")]
    BadInteger(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

#[derive(Clone)]
enum Repr {
    /// Reduced, `den > 0`, `num != i64::MIN`.
    Small(i64, i64),
    /// Reduced and not representable as `Small`.
    Big(BigRational),
}

/// An exact rational number.
#[derive(Clone)]
pub struct Scalar(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Scalar(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        if n == i64::MIN {
            Self::from_big(BigRational::from_integer(BigInt::from(n)))
        } else {
            Scalar(Repr::Small(n, 1))
        }
    }

    /// `num / den`, reduced. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        // Callers never produce i128::MIN: operands are bounded by i64 products.
        let (mut n, mut d) = if den < 0 { (-num, -den) } else { (num, den) };
        if n == 0 {
            return Self::zero();
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        if fits(n) && fits(d) {
            Scalar(Repr::Small(n as i64, d as i64))
        } else {
            Scalar(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))
        }
    }

    /// Canonicalises an already-reduced big rational.
    pub fn from_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Scalar(Repr::Small(n, d));
            }
        }
        Scalar(Repr::Big(r))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(r) => r.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                Self::from_i128(*d as i128, *n as i128)
            }
            Repr::Big(r) => Self::from_big(r.recip()),
        }
    }

    /// Least integer not below the value.
    pub fn ceil(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(-((-n).div_euclid(*d))),
            Repr::Big(r) => r.ceil().to_integer(),
        }
    }

    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(n.div_euclid(*d)),
            Repr::Big(r) => r.floor().to_integer(),
        }
    }

    /// `ceil(self)` clamped into `u64`; negative values map to 0.
    pub fn ceil_u64_saturating(&self) -> u64 {
        let c = self.ceil();
        match c.sign() {
            Sign::Minus | Sign::NoSign => 0,
            Sign::Plus => c.to_u64().unwrap_or(u64::MAX),
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Midpoint of two values.
    pub fn midpoint(&self, other: &Self) -> Self {
        &(self + other) / &Scalar::from_int(2)
    }

    fn big_op(a: &Self, b: &Self, op: impl Fn(BigRational, BigRational) -> BigRational) -> Self {
        Self::from_big(op(a.to_big(), b.to_big()))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<i32> for Scalar {
    fn from(n: i32) -> Self {
        Scalar::from_int(n as i64)
    }
}

impl From<u64> for Scalar {
    fn from(n: u64) -> Self {
        if n <= i64::MAX as u64 {
            Scalar(Repr::Small(n as i64, 1))
        } else {
            Scalar::from_bigint(BigInt::from(n))
        }
    }
}

impl From<usize> for Scalar {
    fn from(n: usize) -> Self {
        Scalar::from(n as u64)
    }
}

impl From<BigUint> for Scalar {
    fn from(n: BigUint) -> Self {
        Scalar::from_bigint(BigInt::from(n))
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_big(r)
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128))),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Small(n, d) => Scalar(Repr::Small(-n, *d)),
            Repr::Big(r) => Scalar::from_big(-r.clone()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    Scalar::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                    Scalar::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Scalar::big_op(self, rhs, |x, y| x + y),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Scalar::from_i128(a * d - c * b, b * d)
            }
            _ => Scalar::big_op(self, rhs, |x, y| x - y),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *d == 1 && *b == 1 {
                    let p = (*a as i128) * (*c as i128);
                    if fits(p) {
                        return Scalar(Repr::Small(p as i64, 1));
                    }
                }
                Scalar::from_i128((*a as i128) * (*c as i128), (*b as i128) * (*d as i128))
            }
            _ => Scalar::big_op(self, rhs, |x, y| x * y),
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Scalar::from_i128((*a as i128) * (*d as i128), (*b as i128) * (*c as i128))
            }
            _ => Scalar::big_op(self, rhs, |x, y| x / y),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|_| ParseScalarError::BadInteger(t.to_string()));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (parse(n)?, parse(d)?),
            None => (parse(s)?, BigInt::one()),
        };
        if d.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(s.to_string()));
        }
        Ok(Scalar::from_big(BigRational::new(n, d)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
