//! Arbitrary-precision rational scalars.
//!
//! `Rat` is `num_rational::BigRational`: always reduced, denominator
//! positive.  The helpers here cover the `"p/q"` string form used by all
//! file formats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::AlgebraError;

pub type Rat = BigRational;

/// Shorthand for an integer rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`. Panics on zero denominator.
pub fn rfrac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` with optional sign, exact.
pub fn parse_rat(s: &str) -> Result<Rat, AlgebraError> {
    let bad = || AlgebraError::BadRational(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

/// Renders in the same `"p"` / `"p/q"` form that [`parse_rat`] accepts.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Integer value of `r`, if it is an integer.
pub fn as_integer(r: &Rat) -> Option<BigInt> {
    if r.denom().is_one() {
        Some(r.numer().clone())
    } else {
        None
    }
}

/// True when `r` is a (positive or negative) unit-free nonzero scalar -- any
/// nonzero rational is invertible, so this is just a zero check spelled out.
pub fn is_unit(r: &Rat) -> bool {
    !r.is_zero()
}

/// `r^k` for any integer `k` (negative powers invert; `0^0 = 1`).
pub fn pow_rat(r: &Rat, k: i64) -> Rat {
    if k == 0 {
        return Rat::one();
    }
    let base = if k < 0 { r.recip() } else { r.clone() };
    let mut acc = Rat::one();
    for _ in 0..k.unsigned_abs() {
        acc *= &base;
    }
    acc
}

/// Sign as -1, 0 or 1.
pub fn sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "7", "-3", "1/2", "-5/8", "22/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
    }

    #[test]
    fn parse_reduces_and_normalizes_sign() {
        assert_eq!(parse_rat("4/8").unwrap(), rfrac(1, 2));
        assert_eq!(parse_rat("3/-6").unwrap(), rfrac(-1, 2));
        assert_eq!(format_rat(&parse_rat("-2/-4").unwrap()), "1/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "1/0", "a", "1.5", "1/2/3", "--3"] {
            assert!(parse_rat(s).is_err(), "{s:?} should be rejected");
        }
    }

    #[test]
    fn integer_powers() {
        assert_eq!(pow_rat(&rfrac(2, 3), 2), rfrac(4, 9));
        assert_eq!(pow_rat(&rfrac(2, 3), -1), rfrac(3, 2));
        assert_eq!(pow_rat(&rint(5), 0), rint(1));
        assert_eq!(pow_rat(&rint(-2), 3), rint(-8));
    }
}
