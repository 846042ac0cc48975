//! Concrete, exactly computable structures.
//!
//! Every structure interprets terms and atoms and supplies an endpoint-grid
//! builder: given a body and the current assignment it returns a finite set
//! of candidate witnesses that meets every cell of the partition the body's
//! atoms induce on the bound variable. Quantifiers are evaluated over that set,
//! so truth values are exact rather than sampled.

mod lex;
mod pair;
mod simple;

use std::collections::BTreeSet;

use rand::RngCore;

pub use lex::{lex_add, lex_flip, lex_scale, LexPoint, QLexGroup};
pub use pair::{PairDlo, PairPoint};
pub use simple::SimpleDlo;

use crate::formula::{Assignment, EvalError, Formula, Relation, Signature, Term};
use crate::rational::{parse_rational, Rational};
use crate::value::Value;

pub trait Structure: Send + Sync {
    fn name(&self) -> &str;
    fn signature(&self) -> &Signature;
    fn eval_term(&self, t: &Term, env: &Assignment) -> Result<Value, EvalError>;
    fn eval_atom(&self, rel: &Relation, args: &[Value]) -> Result<bool, EvalError>;
    /// Finite witness set for `E var. body` under `env`.
    fn witness_grid(&self, var: &str, body: &Formula, env: &Assignment)
        -> Result<Vec<Value>, EvalError>;
    /// Parses an element literal.
    fn parse_value(&self, text: &str) -> Option<Value>;
    /// Draws an element; callers pass a seeded generator.
    fn sample(&self, rng: &mut dyn RngCore) -> Value;
}

pub const STRUCTURE_NAMES: [&str; 3] = ["simple_dlo", "pair_dlo", "qlex"];

/// Looks up one of the order structures by its config name.
pub fn by_name(name: &str) -> Option<Box<dyn Structure>> {
    match name {
        "simple_dlo" => Some(Box::new(SimpleDlo::new())),
        "pair_dlo" => Some(Box::new(PairDlo::new())),
        "qlex" => Some(Box::new(QLexGroup::new())),
        _ => None,
    }
}

/// `(p/q, r/s)`
pub fn parse_pair(text: &str) -> Option<(Rational, Rational)> {
    let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((parse_rational(a)?, parse_rational(b)?))
}

pub(crate) fn lookup(structure: &str, env: &Assignment, v: &str) -> Result<Value, EvalError> {
    let _ = structure;
    env.get(v).cloned().ok_or_else(|| EvalError::Unbound(v.to_string()))
}

pub(crate) fn type_error(structure: &str, expected: &str, found: &Value) -> EvalError {
    EvalError::Type {
        structure: structure.to_string(),
        expected: expected.to_string(),
        found: format!("{} `{}`", found.kind(), found),
    }
}

pub(crate) fn not_interpreted(structure: &str, symbol: impl Into<String>) -> EvalError {
    EvalError::NotInterpreted { structure: structure.to_string(), symbol: symbol.into() }
}

/// Values that the body can see besides `var`: assigned free variables and
/// literal constants, with `zero` standing in for the literal `0`.
pub(crate) fn visible_values(var: &str, body: &Formula, env: &Assignment, zero: Value) -> Vec<Value> {
    let mut names: BTreeSet<String> = body.free_vars();
    names.remove(var);
    let mut out: Vec<Value> = names.iter().filter_map(|n| env.get(n).cloned()).collect();
    out.extend(body.constants().into_iter().cloned());
    let mut mentions_zero = false;
    body.for_each_atom(&mut |_, args| mentions_zero |= args.iter().any(has_zero));
    if mentions_zero {
        out.push(zero);
    }
    out
}

fn has_zero(t: &Term) -> bool {
    match t {
        Term::Zero => true,
        Term::Var(_) | Term::Const(_) => false,
        Term::Add(a, b) => has_zero(a) || has_zero(b),
        Term::Scale(_, t) | Term::Proj(_, t) => has_zero(t),
        Term::App(_, args) => args.iter().any(has_zero),
    }
}

/// True when every atom compares bare variables or literals, so the body is a
/// pure order formula and parameter endpoints are the only breakpoints.
pub(crate) fn is_pure_order(body: &Formula) -> bool {
    let mut pure = true;
    body.for_each_atom(&mut |rel, args| {
        let simple_args = args.iter().all(|t| matches!(t, Term::Var(_) | Term::Const(_) | Term::Zero));
        if !matches!(rel, Relation::Lt | Relation::Eq) || !simple_args {
            pure = false;
        }
    });
    pure
}

pub(crate) fn random_rational(rng: &mut dyn RngCore, span: i64, max_den: i64) -> Rational {
    use rand::Rng;
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(-span * den..=span * den);
    crate::rational::rat(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn pair_literal() {
        assert_eq!(parse_pair("(1/2, -3)"), Some((rat(1, 2), rat(-3, 1))));
        assert_eq!(parse_pair("1/2, 3"), None);
        assert!(by_name("qlex").is_some());
        assert!(by_name("rcf").is_none());
    }
}
