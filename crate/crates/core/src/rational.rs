//! The exact scalar type and a few helpers around it.

use core::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used by every predicate in the crate.
pub type Q = num_rational::Ratio<i64>;

#[inline]
pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

#[inline]
pub fn frac(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn median3(a: Q, b: Q, c: Q) -> Q {
    if a <= b {
        if b <= c {
            b
        } else if a <= c {
            c
        } else {
            a
        }
    } else if a <= c {
        a
    } else if b <= c {
        c
    } else {
        b
    }
}

pub fn max_q(a: Q, b: Q) -> Q {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn min_q(a: Q, b: Q) -> Q {
    if a <= b {
        a
    } else {
        b
    }
}

/// Whether `x` is an integer.
pub fn is_integral(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn floor_i64(x: &Q) -> i64 {
    x.numer().div_floor(x.denom())
}

pub fn ceil_i64(x: &Q) -> i64 {
    x.numer().div_ceil(x.denom())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError;

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected an integer, a fraction p/q or a finite decimal")
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"1.25"`.
pub fn parse_rational(s: &str) -> Result<Q, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError);
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| ParseRationalError)?;
        let d: i64 = d.trim().parse().map_err(|_| ParseRationalError)?;
        if d == 0 {
            return Err(ParseRationalError);
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, fracpart)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if fracpart.is_empty() || !fracpart.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError);
        }
        if fracpart.len() > 15 {
            return Err(ParseRationalError);
        }
        let whole: i64 = if int_digits.is_empty() {
            0
        } else {
            int_digits.parse().map_err(|_| ParseRationalError)?
        };
        let scale = 10i64.pow(fracpart.len() as u32);
        let f: i64 = fracpart.parse().map_err(|_| ParseRationalError)?;
        let v = Q::new(
            whole
                .checked_mul(scale)
                .and_then(|w| w.checked_add(f))
                .ok_or(ParseRationalError)?,
            scale,
        );
        return Ok(if negative { -v } else { v });
    }
    s.parse::<i64>().map(Q::from_integer).map_err(|_| ParseRationalError)
}

/// Canonical text form: `"n"` for integers, `"p/q"` otherwise.
pub struct Display<'a>(pub &'a Q);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub fn abs(x: Q) -> Q {
    x.abs()
}

pub fn zero() -> Q {
    Q::zero()
}
