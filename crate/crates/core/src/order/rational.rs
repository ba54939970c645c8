use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn floor_int(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil_int(x: &Rational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Floor of a rational as an `i64` coordinate.
pub fn floor_i64(x: &Rational) -> Result<i64> {
    floor_int(x)
        .to_i64()
        .ok_or_else(|| Error::Domain(format!("integer part of {} overflows i64", fmt_rational(x))))
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// Always `p/q`, even for integers, so files round-trip bit-exactly.
pub fn fmt_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `p/q`, `p` and `-p/q`. Zero denominators are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::parse(0, format!("malformed rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::parse(0, format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(n, d))
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Stern's diatomic sequence, Dijkstra's loop over the bits of `n`.
fn fusc(n: u64) -> BigInt {
    let (mut a, mut b) = (BigInt::one(), BigInt::zero());
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            b += &a;
        } else {
            a += &b;
        }
        k >>= 1;
    }
    b
}

/// n-th term of the Calkin-Wilf sequence, n >= 1. Hits every positive rational once.
pub fn calkin_wilf(n: u64) -> Rational {
    debug_assert!(n >= 1);
    Rational::new(fusc(n), fusc(n + 1))
}

/// 0, 1, -1, 1/2, -1/2, 2, -2, ...
pub fn enumerate_q(k: u64) -> Rational {
    if k == 0 {
        return zero();
    }
    let n = k.div_ceil(2);
    let r = calkin_wilf(n);
    if k % 2 == 1 {
        r
    } else {
        -r
    }
}
