use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SemiringError;

/// An exact non-negative rational number.
///
/// The wrapped value is always normalized (`gcd(p, q) = 1`, `q >= 1`) and never negative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self, SemiringError> {
        if denom == 0 {
            return Err(SemiringError::ZeroDenominator);
        }
        Self::from_big(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(n: u64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(value: BigRational) -> Result<Self, SemiringError> {
        if value.is_negative() {
            return Err(SemiringError::Negative(value.to_string()));
        }
        Ok(Rational(value))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.0.is_zero()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn plus(&self, other: &Self) -> Self {
        Rational(&self.0 + &other.0)
    }

    pub fn times(&self, other: &Self) -> Self {
        Rational(&self.0 * &other.0)
    }

    /// Division; `None` when `other` is zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &other.0))
        }
    }

    /// Always-explicit `p/q` form used in documents.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_fraction_string())
    }
}

/// Accepts `n`, `p/q` and finite decimals such as `0.25`.
impl FromStr for Rational {
    type Err = SemiringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || SemiringError::BadLiteral(s.to_string());
        if s.is_empty() || s.starts_with(['+', '-']) {
            return Err(bad());
        }
        let digits = |t: &str| -> Result<BigInt, SemiringError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<BigInt>().map_err(|_| bad())
        };
        if let Some((p, q)) = s.split_once('/') {
            let q = digits(q)?;
            if q.is_zero() {
                return Err(SemiringError::ZeroDenominator);
            }
            return Ok(Rational(BigRational::new(digits(p)?, q)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int = if int.is_empty() {
                BigInt::zero()
            } else {
                digits(int)?
            };
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let frac = digits(frac)?;
            return Ok(Rational(BigRational::new(int * &scale + frac, scale)));
        }
        Ok(Rational(BigRational::from_integer(digits(s)?)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn literals_are_normalized() {
        assert_eq!(r("6/4"), r("3/2"));
        assert_eq!(r("0.5"), r("1/2"));
        assert_eq!(r("2"), Rational::from_integer(2));
        assert_eq!(r(".25").to_fraction_string(), "1/4");
        assert_eq!(r("0").to_fraction_string(), "0/1");
    }

    #[test]
    fn rejects_malformed_and_negative() {
        assert!("".parse::<Rational>().is_err());
        assert!("-1".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1/x".parse::<Rational>().is_err());
        assert!("1.".parse::<Rational>().is_err());
        assert!(Rational::new(-1, 2).is_err());
        assert!(Rational::new(1, 0).is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(r("4/2").to_string(), "2");
        assert_eq!(r("3/7").to_string(), "3/7");
        assert_eq!(format!("{:?}", r("2")), "2/1");
    }

    #[test]
    fn division_and_min() {
        let two = r("2");
        let three = r("3");
        assert_eq!(two.checked_div(&three), Some(r("2/3")));
        assert_eq!(two.checked_div(&Rational::zero()), None);
        assert_eq!(two.clone().min(three), two);
    }

    #[test]
    fn serde_uses_fraction_strings() {
        let json = serde_json::to_string(&r("3/2")).unwrap();
        assert_eq!(json, "\"3/2\"");
        let back: Rational = serde_json::from_str("\"6/4\"").unwrap();
        assert_eq!(back, r("3/2"));
    }
}
