//! Exact fractions for reporting.
//!
//! [`Fraction`] keeps numerator and denominator as given (no reduction), so
//! a density over `2^(n+1)` strings always prints with that denominator.
//! Arithmetic goes through [`Rational`].

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = Ratio<i128>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed fraction {0:?}; expected \"num/den\"")]
pub struct ParseFractionError(pub String);

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        Fraction { num, den }
    }

    pub fn ratio(&self) -> Rational {
        Rational::new(self.num as i128, self.den as i128)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = ParseFractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFractionError(s.to_string());
        let (n, d) = s.split_once('/').ok_or_else(err)?;
        let num = n.trim().parse().map_err(|_| err())?;
        let den: u64 = d.trim().parse().map_err(|_| err())?;
        if den == 0 {
            return Err(err());
        }
        Ok(Fraction { num, den })
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `"num/den"` for a reduced rational.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, ParseFractionError> {
    let err = || ParseFractionError(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let num: i128 = n.trim().parse().map_err(|_| err())?;
            let den: i128 = d.trim().parse().map_err(|_| err())?;
            if den == 0 {
                return Err(err());
            }
            Ok(Rational::new(num, den))
        }
        None => s
            .trim()
            .parse::<i128>()
            .map(Rational::from_integer)
            .map_err(|_| err()),
    }
}

/// `2^n` as `u64`; panics past 63.
pub fn pow2(n: usize) -> u64 {
    assert!(n < 64, "2^{n} does not fit in u64");
    1u64 << n
}

/// Smallest integer `>= r * k` for non-negative `r`.
pub fn ceil_mul(r: &Rational, k: u64) -> u64 {
    let v = r * Rational::from_integer(k as i128);
    v.ceil().to_integer().max(0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_denominator() {
        let f = Fraction::new(2, 8);
        assert_eq!(f.to_string(), "2/8");
        assert_eq!(f.ratio(), Rational::new(1, 4));
        assert_eq!("2/8".parse::<Fraction>().unwrap(), f);
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("2").unwrap(), Rational::from_integer(2));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&Rational::new(3, 6)), "1/2");
    }

    #[test]
    fn ceil_mul_rounds_up() {
        assert_eq!(ceil_mul(&Rational::new(1, 3), 8), 3);
        assert_eq!(ceil_mul(&Rational::new(1, 2), 8), 4);
        assert_eq!(ceil_mul(&Rational::new(0, 1), 8), 0);
    }
}
