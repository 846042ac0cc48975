//! Exact rational helpers shared by every structure.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `int` or `int/posint`, surrounding whitespace ignored.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if !den.is_positive() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// `3`, `-1/2`; the inverse of [`parse_rational`].
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// Sorted, deduplicated points plus every midpoint and one point beyond each
/// extreme. For a dense order this hits every cell of the partition induced by
/// `points`. An empty input yields `{0}`.
pub fn refine(points: impl IntoIterator<Item = Rational>) -> Vec<Rational> {
    let mut pts: Vec<Rational> = points.into_iter().collect();
    pts.sort();
    pts.dedup();
    if pts.is_empty() {
        return vec![Rational::zero()];
    }
    let mut out = Vec::with_capacity(2 * pts.len() + 1);
    out.push(&pts[0] - Rational::one());
    for w in pts.windows(2) {
        out.push(w[0].clone());
        out.push(midpoint(&w[0], &w[1]));
    }
    out.push(pts[pts.len() - 1].clone());
    out.push(&pts[pts.len() - 1] + Rational::one());
    out
}

/// Least integer not below `q`.
pub fn ceil(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

pub fn is_integer(q: &Rational) -> bool {
    q.is_integer()
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}
