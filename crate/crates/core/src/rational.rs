//! Exact rational helpers: parsing user input and rendering `p/q` strings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse {input:?} as an exact rational: {reason}")]
pub struct RationalParseError {
    pub input: String,
    pub reason: String,
}

fn err(input: &str, reason: &str) -> RationalParseError {
    RationalParseError {
        input: input.to_string(),
        reason: reason.to_string(),
    }
}

/// Parses `3`, `-2`, `0.625` and `5/8`. A sum of terms
/// separated by `+` or `-` is allowed, where a term may also be a power of two
/// written `2^k` or `2^-k`, e.g. `5/8+2^-30`.
pub fn parse_rational(input: &str) -> Result<BigRational, RationalParseError> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err(input, "empty"));
    }
    let mut total = BigRational::zero();
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut i = 0;
    while i <= bytes.len() {
        let at_split = i == bytes.len()
            || (i > start && (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^');
        if at_split {
            total += parse_term(&s[start..i]).map_err(|r| err(input, &r))?;
            start = i;
        }
        i += 1;
    }
    Ok(total)
}

fn parse_term(t: &str) -> Result<BigRational, String> {
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    if body.is_empty() {
        return Err("dangling sign".into());
    }
    let value = if let Some(exp) = body.strip_prefix("2^") {
        let k: i64 = exp.parse().map_err(|_| format!("bad exponent {exp:?}"))?;
        pow2(k)
    } else if let Some((p, q)) = body.split_once('/') {
        let p = parse_decimal(p)?;
        let q = parse_decimal(q)?;
        if q.is_zero() {
            return Err("zero denominator".into());
        }
        p / q
    } else {
        parse_decimal(body)?
    };
    Ok(if neg { -value } else { value })
}

fn parse_decimal(s: &str) -> Result<BigRational, String> {
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(format!("not a decimal number: {s:?}"));
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| format!("bad digits {s:?}"))?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(num, den))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> BigRational {
    let p = BigInt::one() << k.unsigned_abs() as usize;
    if k >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Renders a reduced fraction as `p/q` (always with a denominator).
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn from_usize(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// Approximate value for display and for sizing float-free searches.
pub fn to_f64(x: &BigRational) -> f64 {
    if let (Some(a), Some(b)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if a.is_finite() && b.is_finite() && b != 0.0 {
            return a / b;
        }
    }
    // Scale down huge operands before converting.
    let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000) as usize;
    let a = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let b = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    a / b
}

/// Largest integer ≤ x.
pub fn floor(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Smallest integer ≥ x.
pub fn ceil(x: &BigRational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

pub fn is_strictly_between_zero_and_one(x: &BigRational) -> bool {
    x.is_positive() && x < &BigRational::one()
}

/// Serde adapter storing a rational as a `"p/q"` string.
pub mod serde_ratio {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Same as [`serde_ratio`] for optional values.
pub mod serde_ratio_opt {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&super::format_rational(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| super::parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("5/8").unwrap(), ratio(5, 8));
        assert_eq!(parse_rational("3").unwrap(), ratio(3, 1));
        assert_eq!(parse_rational("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(
            parse_rational("5/8+2^-30").unwrap(),
            ratio(5, 8) + BigRational::new(1.into(), BigInt::from(1u64 << 30))
        );
        assert_eq!(parse_rational("1 - 2^-2").unwrap(), ratio(3, 4));
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1e-3").is_err());
    }

    #[test]
    fn formats_and_rounds() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&ratio(0, 3)), "0/1");
        assert_eq!(floor(&ratio(-7, 2)), BigInt::from(-4));
        assert_eq!(ceil(&ratio(-7, 2)), BigInt::from(-3));
        assert_eq!(ceil(&ratio(8, 2)), BigInt::from(4));
        assert!((to_f64(&ratio(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
        let tiny = pow2(-3000);
        assert_eq!(to_f64(&(tiny.clone() / tiny)), 1.0);
    }
}
