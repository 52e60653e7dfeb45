//! Exact rational arithmetic for probabilities, thresholds, and smoothing
//! parameters.
//!
//! Posteriors and configuration values are kept as arbitrary-precision
//! rationals so that decisions and event-log payloads are bit-exact across
//! replays. The canonical text form is `"num/den"` in lowest terms (a bare
//! integer when the denominator is 1); decimal literals like `"0.45"` parse
//! exactly.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational number.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Rat {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_usize(n: usize) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Closest `f64`; exact for small numerators and denominators.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat(r)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rat {
    type Err = RatParseError;

    /// Accepts `"2/11"`, `"3"`, and exact decimals like `"0.45"` or `"-1.5"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(RatParseError::Empty);
        }
        let invalid = || RatParseError::Invalid(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let n = BigInt::from_str(num.trim()).map_err(|_| invalid())?;
            let d = BigInt::from_str(den.trim()).map_err(|_| invalid())?;
            if d.is_zero() {
                return Err(RatParseError::ZeroDenominator(s.to_string()));
            }
            return Ok(Rat(BigRational::new(n, d)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(invalid());
            }
            let negative = int.trim_start().starts_with('-');
            let int_part = if int.is_empty() || int == "-" || int == "+" {
                BigInt::zero()
            } else {
                BigInt::from_str(int).map_err(|_| invalid())?
            };
            let frac_part = BigInt::from_str(frac).map_err(|_| invalid())?;
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let numer = int_part.abs() * &scale + frac_part;
            let numer = if negative { -numer } else { numer };
            return Ok(Rat(BigRational::new(numer, scale)));
        }
        let n = BigInt::from_str(s).map_err(|_| invalid())?;
        Ok(Rat(BigRational::from_integer(n)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }

        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);
