//! Exact rational arithmetic helpers shared across the crate.
//!
//! Utilities, probabilities, and regrets are all exact `BigRational`s;
//! nothing in the laboratory touches floating point except Monte-Carlo
//! summaries.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"`, a plain integer, or a decimal such as `"0.05"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Ok(r) = s.parse::<Rational>() {
        return Ok(r);
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let combined = format!("{int_digits}{frac_part}");
        if let Ok(numer) = combined.parse::<BigInt>() {
            let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
            let r = Rational::new(numer, denom);
            return Ok(if negative { -r } else { r });
        }
    }
    Err(Error::InvalidInstance(format!("cannot parse rational {s:?}")))
}

/// Renders with an explicit denominator (`"1/2"`, `"3"`).
pub fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

pub fn is_probability(r: &Rational) -> bool {
    *r >= Rational::zero() && *r <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("3").unwrap(), rat_int(3));
        assert_eq!(parse_rational("0.05").unwrap(), rat(1, 20));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn string_round_trip() {
        for r in [rat(1, 3), rat_int(0), rat(-7, 5)] {
            assert_eq!(parse_rational(&rational_to_string(&r)).unwrap(), r);
        }
    }
}
