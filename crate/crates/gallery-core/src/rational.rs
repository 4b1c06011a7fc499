//! Exact rational scalars.
//!
//! All geometry in this crate is computed over arbitrary-precision rationals;
//! there is no floating-point fast path. Coordinates are parsed from integers,
//! fractions `p/q` and finite decimals, always exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number. Kept reduced with a positive denominator by
/// construction.
pub type Rat = BigRational;

/// Error raised when a coordinate token cannot be parsed exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError {
    token: String,
}

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse `{}` as an exact rational", self.token)
    }
}

impl std::error::Error for ParseRatError {}

/// Shorthand for a rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for a rational `n / d`. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses an integer (`-3`), a fraction (`7/2`) or a finite decimal (`-0.125`)
/// into an exact rational.
pub fn parse_rat(token: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError {
        token: token.to_string(),
    };
    let s = token.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        // Finite decimal: sign belongs to the integer part, the fractional
        // digits scale by a power of ten.
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part
            .strip_prefix(['-', '+'])
            .unwrap_or(int_part);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let whole = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(int_digits).map_err(|_| err())?
        };
        let frac = BigInt::from_str(frac_part).map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut value = Rat::from_integer(whole) + Rat::new(frac, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n = BigInt::from_str(s).map_err(|_| err())?;
    Ok(Rat::from_integer(n))
}

/// Formats a rational as `p` or `p/q`, the form the polygon and CSP file
/// writers emit.
pub fn format_rat(value: &Rat) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Nearest f64, for rendering only; the geometry never rounds.
pub fn to_f64(value: &Rat) -> f64 {
    num_traits::ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(value: &Rat) -> i8 {
    if value.is_zero() {
        0
    } else if value.is_positive() {
        1
    } else {
        -1
    }
}
