//! Exact rationals and their `num/den` text form.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"num/den"` or a bare integer `"num"`. Decimal literals are rejected.
pub fn parse(text: &str) -> Result<Rational> {
    let bad = || Error::MalformedRational(text.to_string());
    let digits = |s: &str, signed: bool| -> bool {
        let s = if signed { s.strip_prefix('-').unwrap_or(s) } else { s };
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    if !digits(num, true) || !digits(den, false) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Canonical `num/den` rendering; integers keep the `/1` suffix.
pub fn format(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Display-only decimal rendering with six significant digits.
pub fn approx(value: &Rational) -> String {
    let x = value.to_f64().unwrap_or(f64::NAN);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{:.*}", decimals, x)
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("6/4").unwrap(), frac(3, 2));
        assert_eq!(parse("-2/4").unwrap(), frac(-1, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(format(&parse("4/2").unwrap()), "2/1");
    }

    #[test]
    fn rejects_decimals_and_zero_denominators() {
        for bad in ["0.5", "1/0", "", "a/b", "1/-2", "1e3", "/3"] {
            assert!(parse(bad).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn approx_keeps_six_significant_digits() {
        assert_eq!(approx(&frac(148, 50)), "2.96000");
        assert_eq!(approx(&frac(1, 3)), "0.333333");
        assert_eq!(approx(&int(1234567)), "1234567");
        assert_eq!(approx(&zero()), "0");
    }
}
