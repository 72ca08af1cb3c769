//! Exact rational exponents and their `"num/den"` text form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An element of the exponent group `H = Q`, always in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RationalExponent(BigRational);

impl RationalExponent {
    pub fn zero() -> Self {
        RationalExponent(BigRational::zero())
    }

    pub fn one() -> Self {
        RationalExponent(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        RationalExponent(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den`, reduced. Panics if `den == 0`; use [`RationalExponent::parse`]
    /// for untrusted input.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        RationalExponent(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(RationalExponent(BigRational::new(num, den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        RationalExponent(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Greatest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        -((-self.0.numer()).div_floor(self.0.denom()))
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid rational {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        Self::from_big(num, den)
    }
}

impl FromStr for RationalExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a RationalExponent> for &'a RationalExponent {
            type Output = RationalExponent;
            fn $method(self, rhs: &'a RationalExponent) -> RationalExponent {
                RationalExponent((&self.0).$method(&rhs.0))
            }
        }

        impl $trait for RationalExponent {
            type Output = RationalExponent;
            fn $method(self, rhs: RationalExponent) -> RationalExponent {
                RationalExponent(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for RationalExponent {
    type Output = RationalExponent;
    fn neg(self) -> RationalExponent {
        RationalExponent(-self.0)
    }
}

impl Neg for &RationalExponent {
    type Output = RationalExponent;
    fn neg(self) -> RationalExponent {
        RationalExponent(-&self.0)
    }
}

impl From<i64> for RationalExponent {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl Serialize for RationalExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Text(String),
            Int(i64),
        }
        match Wire::deserialize(deserializer)? {
            Wire::Text(s) => RationalExponent::parse(&s).map_err(de::Error::custom),
            Wire::Int(n) => Ok(RationalExponent::from_integer(n)),
        }
    }
}
