//! Exact integers and rationals.
//!
//! Every other module works on [`Rational`] values that are kept in lowest
//! terms with a positive denominator. Big naturals and integers are the
//! `num-bigint` types, re-exported as [`Natural`] and [`Integer`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Natural = BigUint;
pub type Integer = BigInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("denominator must be non-zero")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as an integer")]
    Parse(String),
}

/// An exact fraction, always in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `p/q` in lowest terms. The sign ends up on the numerator.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self, ExactError> {
        let q = q.into();
        if q.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(p.into(), q)))
    }

    /// `p/q` for a denominator known to be non-zero.
    pub fn from_parts(p: impl Into<BigInt>, q: impl Into<BigUint>) -> Self {
        let q: BigUint = q.into();
        assert!(!q.is_zero(), "zero denominator");
        Rational(BigRational::new(p.into(), BigInt::from(q)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `1/d` for a positive natural `d`.
    pub fn unit_fraction(d: &BigUint) -> Self {
        Self::from_parts(1, d.clone())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// The denominator, always positive.
    pub fn denom(&self) -> BigUint {
        self.0.denom().magnitude().clone()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> BigInt {
        self.0.numer().div_ceil(self.0.denom())
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    /// Decimal expansion of `self` truncated toward zero after `digits`
    /// fractional digits, e.g. `1/24` at 5 digits is `"0.04166"`.
    pub fn truncated_decimal(&self, digits: usize) -> String {
        let scaled = self.0.numer().magnitude() * BigUint::from(10u32).pow(digits as u32)
            / self.0.denom().magnitude();
        let mut out = String::new();
        if self.is_negative() && !scaled.is_zero() {
            out.push('-');
        }
        out.push_str(&format_scaled(&scaled, digits));
        out
    }
}

/// Formats `scaled / 10^digits` as a fixed-point decimal string.
pub(crate) fn format_scaled(scaled: &BigUint, digits: usize) -> String {
    let s = scaled.to_str_radix(10);
    if digits == 0 {
        return s;
    }
    let padded = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = padded.split_at(padded.len() - digits);
    format!("{int}.{frac}")
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = ExactError;

    /// Accepts `p`, `p/q`, with an optional leading sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|_| ExactError::Parse(t.trim().to_string()))
        };
        match s.split_once('/') {
            Some((p, q)) => Rational::new(parse(p)?, parse(q)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Division by zero panics, as for the primitive numeric types.
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RationalRepr {
            num: self.numer().to_string(),
            den: self.denom().to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = RationalRepr::deserialize(deserializer)?;
        let num = BigInt::from_str(&repr.num).map_err(D::Error::custom)?;
        let den = BigInt::from_str(&repr.den).map_err(D::Error::custom)?;
        Rational::new(num, den).map_err(D::Error::custom)
    }
}

/// Exact `n!`.
pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    // Multiply in u64 chunks to keep the number of big multiplications down.
    let mut chunk: u64 = 1;
    for k in 2..=n {
        match chunk.checked_mul(k) {
            Some(c) => chunk = c,
            None => {
                acc *= chunk;
                chunk = k;
            }
        }
    }
    acc * chunk
}

/// Exact three-way comparison of two rationals.
pub fn compare(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

/// Converts a signed big integer to a natural, if non-negative.
pub fn to_natural(n: &BigInt) -> Option<BigUint> {
    match n.sign() {
        Sign::Minus => None,
        _ => Some(n.magnitude().clone()),
    }
}

pub mod json {
    //! Serde helpers that write big integers as decimal strings.

    use num_bigint::{BigInt, BigUint};
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<T: ToString, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn de_natural<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::from_str(&s).map_err(serde::de::Error::custom)
    }

    pub fn de_integer<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    fn is_canonical(x: &Rational) -> bool {
        let den = BigInt::from(x.denom());
        den >= BigInt::one() && x.numer().gcd(&den).is_one()
    }

    #[test]
    fn construction_normalizes() {
        assert_eq!(r(65, 24).to_string(), "65/24");
        assert_eq!(r(0, 5), Rational::zero());
        assert_eq!(r(0, 5).denom(), BigUint::one());
        assert_eq!(r(6, 4), r(3, 2));
        assert_eq!(r(6, 4).numer(), &BigInt::from(3));
        assert_eq!(r(3, -6).numer(), &BigInt::from(-1));
        assert_eq!(r(3, -6).denom(), BigUint::from(2u32));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(Rational::new(1, 0), Err(ExactError::ZeroDenominator));
        assert!("3/0".parse::<Rational>().is_err());
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(4), BigUint::from(24u32));
        // iterated multiplication oracle
        let oracle = (1..=12u64).product::<u64>();
        assert_eq!(oracle, 479001600);
        assert_eq!(factorial(12), BigUint::from(oracle));
    }

    #[test]
    fn factorial_recurrence_to_500() {
        let mut prev = factorial(0);
        for n in 0..500u64 {
            let next = factorial(n + 1);
            assert_eq!(next, &prev * (n + 1));
            prev = next;
        }
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare(&r(5, 2), &r(8, 3)), Ordering::Less);
        assert_eq!(compare(&r(65, 24), &r(65, 24)), Ordering::Equal);
        assert_eq!(compare(&r(1, 120), &r(1, 24)), Ordering::Less);
        assert_eq!(compare(&r(-1, 2), &r(-1, 3)), Ordering::Less);
    }

    #[test]
    fn truncation_not_rounding() {
        assert_eq!(r(1, 120).truncated_decimal(5), "0.00833");
        assert_eq!(r(1, 24).truncated_decimal(5), "0.04166");
        assert_eq!(r(2, 3).truncated_decimal(3), "0.666");
        assert_eq!(r(-2, 3).truncated_decimal(3), "-0.666");
        assert_eq!(r(-1, 3000).truncated_decimal(3), "0.000");
        assert_eq!(r(65, 24).truncated_decimal(2), "2.70");
        assert_eq!(r(7, 1).truncated_decimal(0), "7");
    }

    #[test]
    fn json_uses_decimal_strings() {
        let big = Rational::from_parts(1, factorial(19));
        let s = serde_json::to_string(&big).unwrap();
        assert_eq!(s, r#"{"num":"1","den":"121645100408832000"}"#);
        let back: Rational = serde_json::from_str(&s).unwrap();
        assert_eq!(back, big);
        // unnormalized input is normalized on the way in
        let x: Rational = serde_json::from_str(r#"{"num":"6","den":"-4"}"#).unwrap();
        assert_eq!(x, r(-3, 2));
        assert!(serde_json::from_str::<Rational>(r#"{"num":"1","den":"0"}"#).is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!("65/24".parse::<Rational>().unwrap(), r(65, 24));
        assert_eq!("-4".parse::<Rational>().unwrap(), r(-4, 1));
        assert!("x/2".parse::<Rational>().is_err());
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (any::<i64>(), 1..i64::MAX).prop_map(|(p, q)| r(p, q))
    }

    proptest! {
        #[test]
        fn arithmetic_is_exact(a in arb_rational(), b in arb_rational()) {
            let sum = &a + &b;
            prop_assert!(is_canonical(&sum));
            prop_assert_eq!(&sum - &b, a.clone());
            let prod = &a * &b;
            prop_assert!(is_canonical(&prod));
            if !b.is_zero() {
                prop_assert_eq!(prod / &b, a);
            }
        }

        #[test]
        fn construction_is_canonical(p in any::<i64>(), q in any::<i64>().prop_filter("nonzero", |q| *q != 0)) {
            let x = r(p, q);
            prop_assert!(is_canonical(&x));
            // p/q == x  <=>  p * den == num * q
            prop_assert_eq!(BigInt::from(p) * BigInt::from(x.denom()), x.numer() * BigInt::from(q));
        }

        #[test]
        fn floor_ceil_bracket(a in arb_rational()) {
            let fl = Rational::from_integer(a.floor());
            let ce = Rational::from_integer(a.ceil());
            prop_assert!(fl <= a && a <= ce);
            prop_assert!(&ce - &fl <= Rational::one());
        }
    }
}
