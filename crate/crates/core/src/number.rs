//! Exact rational numbers: parsing of decimal and `p/q` literals, canonical
//! printing and small combinatorial helpers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, integers, and decimals (optionally with an exponent)
/// into an exact fraction. `"0.1"` is exactly `1/10`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    let err = || ParseRationalError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_int(p.trim()).ok_or_else(err)?;
        let q = parse_int(q.trim()).ok_or_else(err)?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Lowest-terms `p/q` with `q > 0`; integers print without a denominator.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Display adapter for [`format_rational`].
pub struct Fmt<'a>(pub &'a Rational);

impl fmt::Display for Fmt<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Binomial coefficient with `C(m, r) = 0` whenever `m < r` (including
/// negative `m`) and `C(m, 0) = 1` for `m >= 0`.
pub fn binomial(m: i64, r: i64) -> u64 {
    if r < 0 || m < r || m < 0 {
        return 0;
    }
    let r = r.min(m - r) as u64;
    let m = m as u64;
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

pub fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}
