use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, parse_rational, Rational};

/// Finite-support generalized power series Σ c_e·t^e with rational exponents
/// and coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HahnSeries {
    terms: BTreeMap<Rational, Rational>,
}

impl HahnSeries {
    pub fn zero() -> HahnSeries {
        HahnSeries::default()
    }

    /// c·t^e
    pub fn monomial(coeff: Rational, exp: Rational) -> HahnSeries {
        let mut s = HahnSeries::zero();
        s.add_term(exp, coeff);
        s
    }

    /// t^e
    pub fn t(exp: Rational) -> HahnSeries {
        HahnSeries::monomial(Rational::one(), exp)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, Rational)>) -> HahnSeries {
        let mut s = HahnSeries::zero();
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    fn add_term(&mut self, exp: Rational, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// (exponent, coefficient) pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.terms.iter()
    }

    /// Least exponent of the support; `None` stands for v(0) = +∞.
    pub fn valuation(&self) -> Option<&Rational> {
        self.terms.keys().next()
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.terms.values().next()
    }

    /// −1, 0 or 1; the sign of the leading coefficient.
    pub fn signum(&self) -> i32 {
        match self.leading_coeff() {
            None => 0,
            Some(c) if c.is_positive() => 1,
            Some(_) => -1,
        }
    }

    pub fn add(&self, other: &HahnSeries) -> HahnSeries {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> HahnSeries {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &HahnSeries) -> HahnSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &Rational) -> HahnSeries {
        if q.is_zero() {
            return HahnSeries::zero();
        }
        HahnSeries { terms: self.terms.iter().map(|(e, c)| (e.clone(), c * q)).collect() }
    }

    pub fn abs(&self) -> HahnSeries {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Parses `3/2 * t^(1/2) + -1 * t^(2)`; a bare coefficient is a constant
    /// term, `t^(e)` has coefficient 1, and `0` is the zero series.
    pub fn parse(text: &str) -> Option<HahnSeries> {
        let text = text.trim();
        if text == "0" {
            return Some(HahnSeries::zero());
        }
        let mut out = HahnSeries::zero();
        for piece in text.split('+') {
            let piece = piece.trim();
            let (coeff, mono) = match piece.split_once('*') {
                Some((c, m)) => (parse_rational(c)?, m.trim()),
                None if piece.starts_with('t') => (Rational::one(), piece),
                None => (parse_rational(piece)?, "t^(0)"),
            };
            let exp = mono.strip_prefix("t^(")?.strip_suffix(')')?;
            out.add_term(parse_rational(exp)?, coeff);
        }
        Some(out)
    }
}

impl Ord for HahnSeries {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum().cmp(&0)
    }
}

impl PartialOrd for HahnSeries {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{} * t^({})", format_rational(c), format_rational(e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn literal_round_trip() {
        let s = HahnSeries::parse("3/2 * t^(1/2) + -1 * t^(2)").unwrap();
        assert_eq!(s.valuation(), Some(&rat(1, 2)));
        assert_eq!(s.to_string(), "3/2 * t^(1/2) + -1 * t^(2)");
        assert_eq!(HahnSeries::parse(&s.to_string()), Some(s));
        assert_eq!(HahnSeries::parse("0"), Some(HahnSeries::zero()));
        assert_eq!(HahnSeries::parse("t^(-1)"), Some(HahnSeries::t(int(-1))));
        assert_eq!(HahnSeries::parse("2"), Some(HahnSeries::monomial(int(2), int(0))));
        assert!(HahnSeries::parse("2 * x^(1)").is_none());
    }

    #[test]
    fn order_follows_leading_term() {
        let small = HahnSeries::t(int(2));
        let big = HahnSeries::t(int(1));
        assert!(HahnSeries::zero() < small && small < big);
        assert!(big.neg() < small.neg());
        let a = HahnSeries::from_terms([(int(1), int(1)), (int(2), int(5))]);
        assert!(big < a);
    }

    #[test]
    fn cancellation_raises_valuation() {
        let a = HahnSeries::t(int(1));
        let b = HahnSeries::from_terms([(int(1), int(-1)), (rat(3, 2), int(1))]);
        assert_eq!(a.add(&b), HahnSeries::t(rat(3, 2)));
        assert!(a.sub(&a).is_zero());
    }
}
