//! Exact rational helpers shared by the numeric modules.

use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary precision rational used wherever identities must hold exactly.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{0}` as a rational number")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.4"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let whole = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(whole_digits).map_err(|_| err())?
        };
        let scale = num::pow(BigInt::from(10u32), frac.len());
        let frac = BigInt::from_str(frac).map_err(|_| err())?;
        let value = Rational::new(whole * &scale + frac, scale);
        return Ok(if negative { -value } else { value });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| err())
}

pub fn from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio_u64(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Lossy conversion for reporting and floating point search.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact conversion of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// `r^p` for a non-negative integer exponent.
pub fn pow(r: &Rational, p: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..p {
        acc *= r;
    }
    acc
}

/// Largest integer strictly below `r`, i.e. `ceil(r) - 1`.
pub fn largest_integer_below(r: &Rational) -> BigInt {
    r.ceil().to_integer() - BigInt::one()
}

/// Serde adapter storing a rational as the string `"p/q"` (or `"p"`).
pub mod serde_str {
    use super::{parse_rational, Rational};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(de::Error::custom)
    }
}

/// Same as [`serde_str`] for optional values.
pub mod serde_opt_str {
    use super::{parse_rational, Rational};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.collect_str(v),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse_rational(&t).map_err(de::Error::custom))
            .transpose()
    }
}

/// Same as [`serde_str`] for vectors.
pub mod serde_vec_str {
    use super::{parse_rational, Rational};
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&v.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_rational(t).map_err(de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_decimals_and_integers() {
        assert_eq!(parse_rational("2/5").unwrap(), ratio_u64(2, 5));
        assert_eq!(parse_rational("0.4").unwrap(), ratio_u64(2, 5));
        assert_eq!(parse_rational("-.5").unwrap(), -ratio_u64(1, 2));
        assert_eq!(parse_rational("7").unwrap(), from_u64(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn largest_integer_below_is_strict() {
        assert_eq!(largest_integer_below(&ratio_u64(8, 5)), BigInt::from(1));
        assert_eq!(largest_integer_below(&ratio_u64(2, 5)), BigInt::from(0));
        // integral values step down by one
        assert_eq!(largest_integer_below(&from_u64(2)), BigInt::from(1));
    }
}
