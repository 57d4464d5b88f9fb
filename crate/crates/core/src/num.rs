//! Number types and the `"p/q"` text encoding used by every file format.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {0:?}")]
pub struct ParseRatError(pub String);

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

/// Parses `"3"`, `"-3/4"` or `"6/8"` (normalized on the way in).
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: Int = n.parse().map_err(|_| err())?;
    let d: Int = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rat::new(n, d))
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Display adapter for rationals in reports.
pub struct R<'a>(pub &'a Rat);

impl fmt::Display for R<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rat(self.0))
    }
}

pub fn lcm_all<'a>(it: impl IntoIterator<Item = &'a Int>) -> Int {
    it.into_iter().fold(Int::one(), |acc, x| acc.lcm(x))
}

pub fn gcd_all<'a>(it: impl IntoIterator<Item = &'a Int>) -> Int {
    it.into_iter().fold(Int::zero(), |acc, x| acc.gcd(x))
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(it: impl IntoIterator<Item = &'a Rat>) -> Int {
    lcm_all(it.into_iter().map(|r| r.denom()))
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = gcd_all(v.iter());
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Clears denominators of a rational vector, then makes it primitive.
pub fn primitive_from_rational(v: &[Rat]) -> Vec<Int> {
    let d = common_denominator(v.iter());
    let ints: Vec<Int> = v.iter().map(|x| (x * Rat::from_integer(d.clone())).to_integer()).collect();
    primitive(&ints)
}

pub fn is_primitive(v: &[Int]) -> bool {
    gcd_all(v.iter()).is_one()
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat_int(a: &[Rat], b: &[Int]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * Rat::from_integer(y.clone())).sum()
}

pub fn to_ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn to_rats(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

pub fn is_nonneg(r: &Rat) -> bool {
    !r.is_negative()
}
