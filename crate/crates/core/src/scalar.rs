//! Exact rational scalars and small helpers shared across the crate.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use rand::Rng;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse a rational from `p`, `-p`, or `p/q` notation. Rejects `q = 0`.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("invalid numerator `{num}`"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("invalid denominator `{den}`"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in `{text}`"));
    }
    Ok(Rational::new(num, den))
}

/// Render as `p` or `p/q`, matching the file formats used by the CLI.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Bounds used when sampling random rationals.
#[derive(Debug, Clone, Copy)]
pub struct SampleRange {
    pub numerator_bound: i64,
    pub denominator_bound: i64,
}

impl Default for SampleRange {
    fn default() -> Self {
        SampleRange {
            numerator_bound: 10,
            denominator_bound: 10,
        }
    }
}

pub fn random_rational<R: Rng>(rng: &mut R, range: SampleRange) -> Rational {
    let num = rng.gen_range(-range.numerator_bound..=range.numerator_bound);
    let den = rng.gen_range(1..=range.denominator_bound);
    ratio(num, den)
}

pub fn is_zero(value: &Rational) -> bool {
    value.is_zero()
}

pub fn abs(value: &Rational) -> Rational {
    value.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), ratio(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&ratio(-3, 2)), "-3/2");
        assert_eq!(format_rational(&rat(5)), "5");
    }
}
