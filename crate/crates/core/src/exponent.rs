//! Extended exponents `p ∈ [1, ∞]` stored as exact rationals.
//!
//! Everything that classifies a triple `(p, q, r)` into a piecewise case works
//! with reciprocals `1/p`, which are exact rationals in `[0, 1]` (`1/∞ = 0`).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Shorthand for building a rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

pub fn rational_to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtExponent {
    Finite(Rational),
    Infinite,
}

impl ExtExponent {
    pub const INF: ExtExponent = ExtExponent::Infinite;

    pub fn new(value: Rational) -> Result<Self> {
        if value < Rational::one() {
            return Err(Error::InvalidExponent(value.to_string()));
        }
        Ok(ExtExponent::Finite(value))
    }

    pub fn int(value: i64) -> Self {
        Self::new(Rational::from_integer(value)).expect("integer exponent >= 1")
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(rat(num, den)).expect("rational exponent >= 1")
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn two() -> Self {
        Self::int(2)
    }

    /// Builds `p` from `1/p ∈ [0, 1]`.
    pub fn from_reciprocal(recip: Rational) -> Result<Self> {
        if recip.is_negative() || recip > Rational::one() {
            return Err(Error::InvalidExponent(format!("1/({recip})")));
        }
        if recip.is_zero() {
            Ok(ExtExponent::Infinite)
        } else {
            Ok(ExtExponent::Finite(recip.recip()))
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> Rational {
        match self {
            ExtExponent::Finite(p) => p.recip(),
            ExtExponent::Infinite => Rational::zero(),
        }
    }

    /// Conjugate exponent: `1/p + 1/p* = 1`.
    pub fn dual(&self) -> Self {
        ExtExponent::from_reciprocal(Rational::one() - self.reciprocal()).expect("dual of a valid exponent is valid")
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtExponent::Infinite)
    }

    pub fn is_one(&self) -> bool {
        *self == ExtExponent::one()
    }

    /// Unit ball of `ℓ_p^n` is a polytope exactly for `p ∈ {1, ∞}`.
    pub fn is_polytope(&self) -> bool {
        self.is_one() || self.is_infinite()
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtExponent::Finite(p) => rational_to_f64(*p),
            ExtExponent::Infinite => f64::INFINITY,
        }
    }

    pub fn reciprocal_f64(&self) -> f64 {
        rational_to_f64(self.reciprocal())
    }
}

impl PartialOrd for ExtExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtExponent {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger exponent <=> smaller reciprocal
        other.reciprocal().cmp(&self.reciprocal())
    }
}

impl fmt::Display for ExtExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtExponent::Finite(p) if p.is_integer() => write!(f, "{}", p.numer()),
            ExtExponent::Finite(p) => write!(f, "{}/{}", p.numer(), p.denom()),
            ExtExponent::Infinite => f.write_str("inf"),
        }
    }
}

/// Parses a non-negative rational written as `a`, `a/b` or a decimal `a.b`.
pub fn parse_rational(token: &str) -> std::result::Result<Rational, String> {
    let token = token.trim();
    if token.is_empty() {
        return Err("empty number".into());
    }
    if let Some((num, den)) = token.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| format!("bad numerator {num:?}"))?;
        let den: i64 = den.trim().parse().map_err(|_| format!("bad denominator {den:?}"))?;
        if den == 0 {
            return Err("zero denominator".into());
        }
        return Ok(rat(num, den));
    }
    if let Some((int_part, frac_part)) = token.split_once('.') {
        if frac_part.len() > 12 || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("bad decimal {token:?}"));
        }
        let int: i64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| format!("bad decimal {token:?}"))?
        };
        let scale = 10_i64.pow(frac_part.len() as u32);
        let frac: i64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| format!("bad decimal {token:?}"))?
        };
        return Ok(rat(int * scale + frac, scale));
    }
    token
        .parse::<i64>()
        .map(Rational::from_integer)
        .map_err(|_| format!("bad number {token:?}"))
}

impl FromStr for ExtExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" || t.eq_ignore_ascii_case("infinity") {
            return Ok(ExtExponent::Infinite);
        }
        let value = parse_rational(t).map_err(|_| Error::InvalidExponent(t.to_string()))?;
        ExtExponent::new(value).map_err(|_| Error::InvalidExponent(t.to_string()))
    }
}

impl Serialize for ExtExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing a [`Rational`] as `"a/b"` (or `"a"` when integral).
pub mod rational_serde {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn to_string(r: &Rational) -> String {
        if r.is_integer() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::{parse_rational, to_string, Rational};
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&to_string(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

/// Parses a comma-separated exponent list such as `1,4/3,inf`.
///
/// Errors carry the character offset of the offending token.
pub fn parse_exponent_list(input: &str) -> Result<Vec<ExtExponent>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for token in input.split(',') {
        let lead = token.len() - token.trim_start().len();
        let position = offset + lead;
        if token.trim().is_empty() {
            return Err(Error::Parse {
                input: input.to_string(),
                position,
                message: "empty exponent".into(),
            });
        }
        match token.parse::<ExtExponent>() {
            Ok(p) => out.push(p),
            Err(_) => {
                let message = match parse_rational(token) {
                    Ok(v) => format!("exponent {v} is below 1"),
                    Err(e) => e,
                };
                return Err(Error::Parse {
                    input: input.to_string(),
                    position,
                    message,
                });
            }
        }
        offset += token.len() + 1;
    }
    Ok(out)
}
