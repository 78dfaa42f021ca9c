//! Exact rational numbers and small helpers used throughout the crate.
//!
//! All quantities in this crate (slopes, exponents, heights, rescaled
//! multiplicities) are exact; nothing is ever rounded. `Rational` is
//! arbitrary precision and always stored reduced with a positive
//! denominator, so equality and ordering are exact.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `p/q` as an exact rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Denominator of a reduced rational as `u64`.
pub fn denom_u64(x: &Rational) -> Result<u64> {
    x.denom()
        .to_u64()
        .ok_or_else(|| Error::Overflow(format!("denominator of {x} exceeds u64")))
}

/// lcm of the denominators of `xs`, as `u64` (1 for an empty list).
pub fn lcm_of_denoms<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Result<u64> {
    let mut l = BigUint::one();
    for x in xs {
        l = l.lcm(&x.denom().magnitude().clone());
    }
    l.to_u64()
        .ok_or_else(|| Error::Overflow("lcm of denominators exceeds u64".into()))
}

/// Smallest element of `(1/r)·Z` strictly greater than `x`.
pub fn grid_above(x: &Rational, r: u64) -> Rational {
    let r = BigInt::from(r);
    let scaled = x * Rational::from_integer(r.clone());
    Rational::new(scaled.floor().to_integer() + 1, r)
}

/// True if `x` lies on the grid `(1/r)·Z`.
pub fn on_grid(x: &Rational, r: u64) -> bool {
    (x * Rational::from_integer(BigInt::from(r))).is_integer()
}

/// Exact fraction rendering: `p/q`, or just `p` when the denominator is 1.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `p/q` or `-p/q` (used by the JSON tree reader).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::Parse {
        offset: 0,
        message: format!("invalid rational `{s}`"),
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num.trim().parse().map_err(|_| err())?;
    let d: BigInt = den.trim().parse().map_err(|_| err())?;
    if d.is_zero() || d.is_negative() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_above_lands_strictly_above() {
        assert_eq!(grid_above(&rat(5, 3), 1), rat_int(2));
        assert_eq!(grid_above(&rat(7, 3), 1), rat_int(3));
        assert_eq!(grid_above(&rat(9, 4), 2), rat(5, 2));
        // exact grid points move one full step
        assert_eq!(grid_above(&rat_int(2), 1), rat_int(3));
        assert_eq!(grid_above(&rat(1, 2), 2), rat_int(1));
    }

    #[test]
    fn rational_round_trip() {
        for s in ["5/3", "-7/2", "4", "0"] {
            let x = parse_rational(s).unwrap();
            assert_eq!(format_rational(&x), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn lcm_of_denominators() {
        let xs = [rat(5, 2), rat(3, 2), rat(5, 4)];
        assert_eq!(lcm_of_denoms(xs.iter()).unwrap(), 4);
        assert_eq!(lcm_of_denoms([].iter()).unwrap(), 1);
    }
}
