//! Exact numbers used throughout the analysis.
//!
//! Run times are stored as whole milliseconds and every score is an exact
//! [`Rational`]. Decimal text only appears at the edges: parsing input cells
//! and rendering report tables.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Builds `numer / denom` as a [`Rational`].
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Builds an integer [`Rational`].
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Duration with millisecond granularity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Millis(u64);

impl Millis {
    pub const ZERO: Millis = Millis(0);

    pub const fn from_millis(ms: u64) -> Self {
        Millis(ms)
    }

    pub const fn from_secs(secs: u64) -> Self {
        Millis(secs * 1000)
    }

    pub const fn as_millis(self) -> u64 {
        self.0
    }

    /// Exact value in seconds.
    pub fn seconds(self) -> Rational {
        Rational::new(BigInt::from(self.0), BigInt::from(1000))
    }

    pub fn saturating_add(self, other: Millis) -> Millis {
        Millis(self.0.saturating_add(other.0))
    }

    /// Parses a decimal number of seconds, rounding to the nearest millisecond
    /// (halves away from zero).
    pub fn parse_seconds(text: &str) -> Result<Self, TimeParseError> {
        let value = parse_decimal(text).ok_or(TimeParseError::NotANumber)?;
        if value.is_negative() {
            return Err(TimeParseError::Negative);
        }
        let ms = round_half_away(&(value * int(1000)));
        ms.to_u64().map(Millis).ok_or(TimeParseError::OutOfRange)
    }

    /// Parses a decimal number of milliseconds.
    pub fn parse_millis(text: &str) -> Result<Self, TimeParseError> {
        let value = parse_decimal(text).ok_or(TimeParseError::NotANumber)?;
        if value.is_negative() {
            return Err(TimeParseError::Negative);
        }
        round_half_away(&value)
            .to_u64()
            .map(Millis)
            .ok_or(TimeParseError::OutOfRange)
    }
}

impl fmt::Display for Millis {
    /// Seconds with trailing zeros trimmed, e.g. `12.5`, `3`, `0.007`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / 1000;
        let frac = self.0 % 1000;
        if frac == 0 {
            write!(f, "{whole}")
        } else {
            let digits = format!("{frac:03}");
            write!(f, "{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl Serialize for Millis {
    /// Seconds as decimal text.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TimeParseError {
    #[error("not a number")]
    NotANumber,
    #[error("negative")]
    Negative,
    #[error("out of range")]
    OutOfRange,
}

/// Parses decimal text into an exact rational.
///
/// Accepts an optional sign, digits with an optional fractional part, an
/// optional exponent (`1.5e3`) and the fraction form `p/q`. Surrounding
/// whitespace is ignored.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }

    let (negative, body) = match text.as_bytes()[0] {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(&digits).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let value = if scale >= 0 {
        Rational::from_integer(numer * pow10(scale as u32))
    } else {
        Rational::new(numer, pow10(scale.unsigned_abs()))
    };
    Some(value)
}

fn pow10(exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), exp as usize)
}

fn round_half_away(value: &Rational) -> BigInt {
    let (q, r) = value.numer().div_rem(value.denom());
    let twice = r.abs() * 2;
    if twice >= *value.denom() {
        if value.is_negative() {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Renders `value` exactly as a terminating decimal when possible, otherwise
/// as `p/q`. Used for the canonical dataset form.
pub fn to_exact_decimal(value: &Rational) -> String {
    let mut denom = value.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{}/{}", value.numer(), value.denom());
    }
    let places = twos.max(fives);
    let scaled = value * Rational::from_integer(pow10(places));
    let digits = scaled.to_integer();
    place_point(&digits, places as usize)
}

fn place_point(digits: &BigInt, places: usize) -> String {
    let negative = digits.sign() == Sign::Minus;
    let mut s = digits.abs().to_string();
    if places > 0 {
        if s.len() <= places {
            s = format!("{}{}", "0".repeat(places + 1 - s.len()), s);
        }
        s.insert(s.len() - places, '.');
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        s = trimmed.to_string();
    }
    if negative && s != "0" {
        s.insert(0, '-');
    }
    s
}

/// Renders `value` rounded to `digits` significant digits in positional
/// notation, trailing zeros removed (`0.75`, `1.25`, `0.333333`).
pub fn format_significant(value: &Rational, digits: u32) -> String {
    assert!(digits > 0);
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let magnitude = value.abs();

    // exponent e with 10^e <= |value| < 10^(e+1)
    let mut exponent: i64 = 0;
    let ten = int(10);
    let mut probe = Rational::one();
    if magnitude >= probe {
        while magnitude >= &probe * &ten {
            probe *= &ten;
            exponent += 1;
        }
    } else {
        while magnitude < probe {
            probe /= &ten;
            exponent -= 1;
        }
    }

    let shift = digits as i64 - 1 - exponent;
    let scaled = if shift >= 0 {
        &magnitude * Rational::from_integer(pow10(shift as u32))
    } else {
        &magnitude / Rational::from_integer(pow10((-shift) as u32))
    };
    let mut rounded = round_half_away(&scaled);
    let mut shift = shift;
    if rounded >= pow10(digits) {
        rounded /= 10;
        shift -= 1;
    }
    let body = if shift >= 0 {
        place_point(&rounded, shift as usize)
    } else {
        (rounded * pow10((-shift) as u32)).to_string()
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Six significant digits, the rendering used by every report table.
pub fn format6(value: &Rational) -> String {
    format_significant(value, 6)
}

/// `value` as a percentage with one decimal place, e.g. `36.1%`.
pub fn format_percent(value: &Rational) -> String {
    let tenths = round_half_away(&(value * int(1000)));
    format!("{}%", place_point(&tenths, 1))
}

/// Lossy conversion for plotting and FFI consumers.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_decimal(&text).ok_or_else(|| serde::de::Error::custom("invalid rational"))
    }
}

/// Serde adapter for optional rationals.
pub mod opt_rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&to_fraction(v)),
            None => s.serialize_none(),
        }
    }
}

/// `p/q`, or just `p` for integers.
pub fn to_fraction(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Wrapper that serializes as an exact fraction string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Exact(#[serde(with = "rational_str")] pub Rational);
