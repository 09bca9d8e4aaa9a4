//! Exact rationals and the one-point extension by `+∞` used for Lebesgue
//! exponents.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Exact rational, always in lowest terms.
pub type Q = Rational64;

/// Shorthand constructor for `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Shorthand for an integer rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn q_to_f64(x: Q) -> f64 {
    x.to_f64().expect("rational fits in f64")
}

/// Formats as `n` or `n/d`.
pub fn fmt_q(x: Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `n`, `n/d` or a finite decimal such as `-0.25`.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(q(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_abs: i64 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            t => t.parse().map_err(|_| bad())?,
        };
        let den = 10i64.pow(frac.len() as u32);
        let num = int_abs.checked_mul(den).and_then(|v| v.checked_add(frac.parse::<i64>().ok()?)).ok_or_else(bad)?;
        return Ok(q(if neg { -num } else { num }, den));
    }
    s.parse::<i64>().map(qi).map_err(|_| bad())
}

/// A rational number or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedRational {
    Finite(Q),
    Infinity,
}

pub use ExtendedRational::{Finite, Infinity};

impl ExtendedRational {
    pub fn int(n: i64) -> Self {
        Finite(qi(n))
    }

    pub fn new(n: i64, d: i64) -> Self {
        Finite(q(n, d))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Infinity)
    }

    pub fn finite(self) -> Option<Q> {
        match self {
            Finite(x) => Some(x),
            Infinity => None,
        }
    }

    /// `x ↦ x/(x−1)`, with `1′ = ∞` and `∞′ = 1`. Defined for `x ≥ 1`.
    pub fn conjugate(self) -> Self {
        match self {
            Infinity => Finite(Q::one()),
            Finite(x) if x == Q::one() => Infinity,
            Finite(x) => Finite(x / (x - Q::one())),
        }
    }

    /// `1/x`, with `1/∞ = 0`. Defined for `x > 0`.
    pub fn recip(self) -> Q {
        match self {
            Infinity => Q::zero(),
            Finite(x) => x.recip(),
        }
    }

    /// Negation; `None` for `+∞`, which has no negative in this type.
    pub fn checked_neg(self) -> Option<Self> {
        self.finite().map(|x| Finite(-x))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Infinity => f64::INFINITY,
            Finite(x) => q_to_f64(x),
        }
    }
}

impl Add for ExtendedRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => Infinity,
        }
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Infinity, Infinity) => Ordering::Equal,
            (Infinity, _) => Ordering::Greater,
            (_, Infinity) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl From<Q> for ExtendedRational {
    fn from(x: Q) -> Self {
        Finite(x)
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infinity => f.write_str("inf"),
            Finite(x) => f.write_str(&fmt_q(*x)),
        }
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "inf" | "Inf" | "INF" | "infinity" | "∞" => Ok(Infinity),
            t => parse_q(t).map(Finite),
        }
    }
}

impl Serialize for ExtendedRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtendedRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing a [`Q`] as the string `"n/d"`.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(x: Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}
