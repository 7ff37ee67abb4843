//! Exact semirings and finitely supported functions into them.
//!
//! Two instances ship: the booleans (disjunction, conjunction) and the
//! non-negative rationals. Both are commutative; refinement signatures rely
//! on that.

mod fsf;
mod rational;

use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use fsf::FiniteSupportFn;
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemiringError {
    #[error("semiring mismatch: expected {expected}, found {found}")]
    Mismatch {
        expected: SemiringKind,
        found: SemiringKind,
    },
    #[error("negative value {0} is not allowed")]
    Negative(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed number literal `{0}`")]
    BadLiteral(String),
    #[error("pairing is not injective: two support pairs map to `{0}`")]
    PairingCollision(String),
    #[error("unknown semiring `{0}`")]
    UnknownKind(String),
}

/// Tag identifying a semiring instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemiringKind {
    Boolean,
    Rational,
}

impl SemiringKind {
    pub fn name(self) -> &'static str {
        match self {
            SemiringKind::Boolean => "bool",
            SemiringKind::Rational => "rational",
        }
    }

    pub fn zero(self) -> SemiringValue {
        match self {
            SemiringKind::Boolean => SemiringValue::Bool(false),
            SemiringKind::Rational => SemiringValue::Rational(Rational::zero()),
        }
    }

    pub fn one(self) -> SemiringValue {
        match self {
            SemiringKind::Boolean => SemiringValue::Bool(true),
            SemiringKind::Rational => SemiringValue::Rational(Rational::one()),
        }
    }
}

impl fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SemiringKind {
    type Err = SemiringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bool" => Ok(SemiringKind::Boolean),
            "rational" => Ok(SemiringKind::Rational),
            other => Err(SemiringError::UnknownKind(other.to_string())),
        }
    }
}

impl Serialize for SemiringKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for SemiringKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A commutative semiring `(R, +, 0, *, 1)` with decidable equality.
pub trait Semiring:
    Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const KIND: SemiringKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn into_value(self) -> SemiringValue;
    fn from_value(value: SemiringValue) -> Result<Self, SemiringError>;
}

impl Semiring for bool {
    const KIND: SemiringKind = SemiringKind::Boolean;

    fn zero() -> Self {
        false
    }

    fn one() -> Self {
        true
    }

    fn plus(&self, other: &Self) -> Self {
        *self || *other
    }

    fn times(&self, other: &Self) -> Self {
        *self && *other
    }

    fn into_value(self) -> SemiringValue {
        SemiringValue::Bool(self)
    }

    fn from_value(value: SemiringValue) -> Result<Self, SemiringError> {
        match value {
            SemiringValue::Bool(b) => Ok(b),
            other => Err(SemiringError::Mismatch {
                expected: SemiringKind::Boolean,
                found: other.kind(),
            }),
        }
    }
}

impl Semiring for Rational {
    const KIND: SemiringKind = SemiringKind::Rational;

    fn zero() -> Self {
        Rational::zero()
    }

    fn one() -> Self {
        Rational::one()
    }

    fn plus(&self, other: &Self) -> Self {
        Rational::plus(self, other)
    }

    fn times(&self, other: &Self) -> Self {
        Rational::times(self, other)
    }

    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }

    fn into_value(self) -> SemiringValue {
        SemiringValue::Rational(self)
    }

    fn from_value(value: SemiringValue) -> Result<Self, SemiringError> {
        match value {
            SemiringValue::Rational(r) => Ok(r),
            other => Err(SemiringError::Mismatch {
                expected: SemiringKind::Rational,
                found: other.kind(),
            }),
        }
    }
}

/// A dynamically tagged semiring element.
///
/// Serializes as a JSON boolean or as a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemiringValue {
    Bool(bool),
    Rational(Rational),
}

impl SemiringValue {
    pub fn kind(&self) -> SemiringKind {
        match self {
            SemiringValue::Bool(_) => SemiringKind::Boolean,
            SemiringValue::Rational(_) => SemiringKind::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SemiringValue::Bool(b) => !*b,
            SemiringValue::Rational(r) => r.is_zero(),
        }
    }

    pub fn try_plus(&self, other: &Self) -> Result<Self, SemiringError> {
        match (self, other) {
            (SemiringValue::Bool(a), SemiringValue::Bool(b)) => Ok(SemiringValue::Bool(*a || *b)),
            (SemiringValue::Rational(a), SemiringValue::Rational(b)) => {
                Ok(SemiringValue::Rational(a.plus(b)))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn try_times(&self, other: &Self) -> Result<Self, SemiringError> {
        match (self, other) {
            (SemiringValue::Bool(a), SemiringValue::Bool(b)) => Ok(SemiringValue::Bool(*a && *b)),
            (SemiringValue::Rational(a), SemiringValue::Rational(b)) => {
                Ok(SemiringValue::Rational(a.times(b)))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    /// Rational comparison; booleans have no order here.
    pub fn try_min(&self, other: &Self) -> Result<Self, SemiringError> {
        match (self, other) {
            (SemiringValue::Rational(a), SemiringValue::Rational(b)) => {
                Ok(SemiringValue::Rational(a.min(b).clone()))
            }
            (SemiringValue::Rational(_), _) => Err(self.mismatch(other)),
            _ => Err(SemiringError::Mismatch {
                expected: SemiringKind::Rational,
                found: self.kind(),
            }),
        }
    }

    fn mismatch(&self, other: &Self) -> SemiringError {
        SemiringError::Mismatch {
            expected: self.kind(),
            found: other.kind(),
        }
    }
}

impl fmt::Display for SemiringValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiringValue::Bool(b) => write!(f, "{b}"),
            SemiringValue::Rational(r) => write!(f, "{r}"),
        }
    }
}

impl From<bool> for SemiringValue {
    fn from(b: bool) -> Self {
        SemiringValue::Bool(b)
    }
}

impl From<Rational> for SemiringValue {
    fn from(r: Rational) -> Self {
        SemiringValue::Rational(r)
    }
}

impl Serialize for SemiringValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            SemiringValue::Bool(b) => serializer.serialize_bool(*b),
            SemiringValue::Rational(r) => r.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for SemiringValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Bool(bool),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Bool(b) => Ok(SemiringValue::Bool(b)),
            Raw::Text(s) => s
                .parse()
                .map(SemiringValue::Rational)
                .map_err(serde::de::Error::custom),
        }
    }
}
