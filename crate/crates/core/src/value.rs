//! Structure elements.

use std::fmt;

use crate::hahn::HahnSeries;
use crate::padic::PadicApprox;
use crate::rational::{format_rational, Rational};

/// An element of one of the concrete structures. Each structure accepts only
/// the variants it interprets and reports a type error otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Rat(Rational),
    /// A point of ℚ×ℚ; read lexicographically by `qlex`, coordinatewise by `pair_dlo`.
    Pair(Rational, Rational),
    Series(HahnSeries),
    Padic(PadicApprox),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Rat(_) => "rational",
            Value::Pair(..) => "pair",
            Value::Series(_) => "series",
            Value::Padic(_) => "p-adic",
        }
    }

    pub fn as_rat(&self) -> Option<&Rational> {
        match self {
            Value::Rat(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Rational, &Rational)> {
        match self {
            Value::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rat(q) => write!(f, "{}", format_rational(q)),
            Value::Pair(a, b) => write!(f, "({}, {})", format_rational(a), format_rational(b)),
            Value::Series(s) => write!(f, "{s}"),
            Value::Padic(x) => write!(f, "{x}"),
        }
    }
}
