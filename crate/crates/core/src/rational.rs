//! Exact rational helpers shared by the symbolic modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"` or `"p"` into an exact rational. Floats are rejected.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let fail = |reason: &str| Error::ParseRational {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Err(fail("empty string"));
    }
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| fail("numerator is not an integer"))?;
    let den: BigInt = den.parse().map_err(|_| fail("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(fail("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators overflow the direct conversion.
        let n = value.numer().to_f64().unwrap_or(f64::NAN);
        let d = value.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Returns `Some(n)` when the rational is an integer that fits in `i64`.
pub fn as_integer(value: &Rational) -> Option<i64> {
    if value.is_integer() {
        value.to_integer().to_i64()
    } else {
        None
    }
}

pub fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}

pub fn pow_i(base: &Rational, exp: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational("2/6").unwrap(), rat(1, 3));
        assert_eq!(parse_rational(" 7/14 ").unwrap(), rat(1, 2));
    }

    #[test]
    fn rejects_floats_and_zero_denominators() {
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn integer_detection() {
        assert_eq!(as_integer(&rat(6, 3)), Some(2));
        assert_eq!(as_integer(&rat(1, 3)), None);
    }
}
