//! Exact scalars and vectors.
//!
//! `Rational` is `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator. The helpers here cover the
//! textual format (`"p/q"` or `"p"`) and the small amount of vector algebra
//! the polyhedral code needs.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type QVec = Vec<Rational>;
pub type ZVec = Vec<BigInt>;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(v: &[i64]) -> QVec {
    v.iter().map(|&x| q(x)).collect()
}

pub fn zero_vec(n: usize) -> QVec {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> QVec {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

/// Parses `"p/q"` or `"p"` (optional sign, decimal digits only).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("invalid rational '{s}' (expected \"p/q\" or \"p\")"));
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let valid = |x: &str, allow_sign: bool| {
        let digits = if allow_sign {
            x.strip_prefix('-').or_else(|| x.strip_prefix('+')).unwrap_or(x)
        } else {
            x
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return Err(bad());
    }
    let n: BigInt = num.trim_start_matches('+').parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("invalid rational '{s}' (zero denominator)")));
    }
    Ok(Rational::new(n, d))
}

/// Formats in lowest terms: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn format_vec(v: &[Rational]) -> String {
    let mut s = String::from("(");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{}", format_rational(x));
    }
    s.push(')');
    s
}

/// Comma-separated rationals, as used on the command line.
pub fn parse_vec(s: &str) -> Result<QVec> {
    s.split(',').map(parse_rational).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> QVec {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Rational]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Removes repeated vectors, keeping first occurrences.
pub fn dedup_vecs(vs: Vec<QVec>) -> Vec<QVec> {
    let mut out: Vec<QVec> = Vec::with_capacity(vs.len());
    for v in vs {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

pub fn to_qvec(v: &[BigInt]) -> QVec {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

/// Integer entries of an integral rational vector.
pub fn to_zvec(v: &[Rational]) -> ZVec {
    v.iter()
        .map(|x| {
            debug_assert!(x.is_integer());
            x.to_integer()
        })
        .collect()
}

pub fn zdot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides out the gcd of the entries; the zero vector is returned unchanged.
pub fn normalize_zvec(v: &mut [BigInt]) {
    let g = content(v);
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

/// Positive integer multiple of a rational vector with coprime entries.
pub fn clear_denominators(v: &[Rational]) -> ZVec {
    let l = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut out: ZVec = v
        .iter()
        .map(|x| (x * Rational::from_integer(l.clone())).to_integer())
        .collect();
    normalize_zvec(&mut out);
    out
}

/// Sign of the first nonzero entry (0 for the zero vector).
pub fn leading_sign(v: &[Rational]) -> i32 {
    for x in v {
        if x.is_positive() {
            return 1;
        }
        if x.is_negative() {
            return -1;
        }
    }
    0
}
