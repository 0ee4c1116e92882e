use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exponent p in [1, inf]. Infinity is a tagged case, never the float
/// `f64::INFINITY` in arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_infinite() && value > 0.0 {
            return Ok(PExponent::Infinity);
        }
        if !value.is_finite() || value < 1.0 {
            return Err(Error::InvalidExponent(value));
        }
        Ok(PExponent::Finite(value))
    }

    pub const ONE: PExponent = PExponent::Finite(1.0);
    pub const TWO: PExponent = PExponent::Finite(2.0);

    pub fn is_one(self) -> bool {
        matches!(self, PExponent::Finite(v) if v == 1.0)
    }

    pub fn is_two(self) -> bool {
        matches!(self, PExponent::Finite(v) if v == 2.0)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, PExponent::Infinity)
    }

    /// Finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            PExponent::Finite(v) => Some(v),
            PExponent::Infinity => None,
        }
    }

    /// Hölder conjugate: 1/p + 1/p' = 1, with 1' = inf and inf' = 1.
    pub fn conjugate(self) -> PExponent {
        match self {
            PExponent::Infinity => PExponent::Finite(1.0),
            PExponent::Finite(v) if v == 1.0 => PExponent::Infinity,
            PExponent::Finite(v) => PExponent::Finite(v / (v - 1.0)),
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(v) => write!(f, "{v}"),
            PExponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "oo" => Ok(PExponent::Infinity),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad exponent {s:?}")))?;
                PExponent::new(v)
            }
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PExponent::Finite(v) => s.serialize_f64(*v),
            PExponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => PExponent::new(v).map_err(de::Error::custom),
            Raw::Str(s) => s.parse().map_err(de::Error::custom),
        }
    }
}
