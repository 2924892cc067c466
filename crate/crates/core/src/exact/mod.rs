//! Exact numbers: big rationals, quadratic surds `p + q√r`, and
//! fractional-linear maps with big-integer coefficients.

mod fraclin;
mod surd;

pub use fraclin::{quadratic_roots, FixedPoints, FracLin};
pub use surd::{rational_between, ExtSurd, Surd};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"int"` or `"num/den"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Bit length of the larger of numerator and denominator.
pub fn rational_bits(r: &Rational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

pub(crate) fn floor_rational(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub(crate) fn ceil_rational(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// Clears denominators: returns integers proportional to `values` with no
/// common factor, keeping signs.
pub(crate) fn scale_to_integers(values: &[Rational]) -> Vec<BigInt> {
    let lcm = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut ints: Vec<BigInt> = values
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in &mut ints {
            *v = &*v / &g;
        }
    }
    ints
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(format_rational(&rat(-3, 2)), "-3/2");
        assert_eq!(format_rational(&int(7)), "7");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn scaling_keeps_ratios() {
        let v = scale_to_integers(&[rat(1, 2), rat(-1, 3), int(0)]);
        assert_eq!(v, vec![BigInt::from(3), BigInt::from(-2), BigInt::from(0)]);
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(floor_rational(&rat(-3, 2)), BigInt::from(-2));
        assert_eq!(ceil_rational(&rat(-3, 2)), BigInt::from(-1));
        assert_eq!(ceil_rational(&int(4)), BigInt::from(4));
    }
}
