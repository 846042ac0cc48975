//! First-order syntax over the workbench signatures: terms, formulas,
//! parsing, printing, substitution and exact evaluation.

mod eval;
mod parse;
mod print;
mod subst;

use std::collections::{BTreeMap, BTreeSet};

pub use eval::{evaluate, evaluate_term, EvalError};
pub use parse::{parse, parse_term, ParseError};
pub use subst::{fresh_name, rename_apart, substitute};

use crate::rational::Rational;
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Zero,
    /// Literal element: a rational (`3/2`) or a pair (`(1, 2)`).
    Const(Value),
    Add(Box<Term>, Box<Term>),
    /// `(q)*t`
    Scale(Rational, Box<Term>),
    /// Application of a signature function symbol (only unary `f` in practice).
    App(String, Vec<Term>),
    /// Coordinate projection `t.1` / `t.2`.
    Proj(u8, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    /// Literal constant; the rational zero is folded into [`Term::Zero`].
    pub fn constant(v: Value) -> Term {
        match v {
            Value::Rat(ref q) if num_traits::Zero::is_zero(q) => Term::Zero,
            v => Term::Const(v),
        }
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn scale(q: Rational, t: Term) -> Term {
        Term::Scale(q, Box::new(t))
    }

    pub fn app(f: &str, arg: Term) -> Term {
        Term::App(f.to_string(), vec![arg])
    }

    pub fn proj(i: u8, t: Term) -> Term {
        Term::Proj(i, Box::new(t))
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero | Term::Const(_) => {}
            Term::Add(a, b) => {
                a.free_vars_into(out);
                b.free_vars_into(out);
            }
            Term::Scale(_, t) | Term::Proj(_, t) => t.free_vars_into(out),
            Term::App(_, args) => args.iter().for_each(|t| t.free_vars_into(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Zero | Term::Const(_) => false,
            Term::Add(a, b) => a.mentions(var) || b.mentions(var),
            Term::Scale(_, t) | Term::Proj(_, t) => t.mentions(var),
            Term::App(_, args) => args.iter().any(|t| t.mentions(var)),
        }
    }

    /// Constants occurring in the term.
    pub fn constants_into<'a>(&'a self, out: &mut Vec<&'a Value>) {
        match self {
            Term::Const(v) => out.push(v),
            Term::Var(_) | Term::Zero => {}
            Term::Add(a, b) => {
                a.constants_into(out);
                b.constants_into(out);
            }
            Term::Scale(_, t) | Term::Proj(_, t) => t.constants_into(out),
            Term::App(_, args) => args.iter().for_each(|t| t.constants_into(out)),
        }
    }
}

/// Valuation bound used by annulus atoms; `None` stands for ±∞.
pub type ValBound = Option<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Lt,
    Eq,
    /// Hahn predicate `P`.
    P,
    /// Hahn alternation relation `R_n`.
    R(u32),
    /// `v(s) <= v(t)`.
    Vle,
    /// `Ann(t, upper, lower)`: upper ≥ v(t) ≥ lower; `None` is +∞ / −∞.
    Ann { upper: ValBound, lower: ValBound },
    /// `Pow(n, lambda, t)`: t ∈ λ·P_n.
    Pow { n: u32, lambda: u64 },
    /// Any other relation symbol declared by a signature.
    Named(String),
}

impl Relation {
    pub fn arity(&self) -> usize {
        match self {
            Relation::Lt | Relation::Eq | Relation::R(_) | Relation::Vle => 2,
            Relation::P | Relation::Ann { .. } | Relation::Pow { .. } => 1,
            Relation::Named(_) => usize::MAX,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Relation, Vec<Term>),
    Not(Box<Formula>),
    /// Empty conjunction is `true`.
    And(Vec<Formula>),
    /// Empty disjunction is `false`.
    Or(Vec<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn truth() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn falsity() -> Formula {
        Formula::Or(Vec::new())
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Atom(Relation::Lt, vec![a, b])
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(Relation::Eq, vec![a, b])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction with singleton collapse.
    pub fn and(mut parts: Vec<Formula>) -> Formula {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        }
    }

    /// Disjunction with singleton collapse.
    pub fn or(mut parts: Vec<Formula>) -> Formula {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        }
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::And(v) if v.is_empty())
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::Or(v) if v.is_empty())
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_rec(&mut BTreeSet::new(), &mut out);
        out
    }

    fn free_vars_rec(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => {
                for t in args {
                    for v in t.vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
            }
            Formula::Not(f) => f.free_vars_rec(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.free_vars_rec(bound, out))
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let fresh = bound.insert(v.clone());
                body.free_vars_rec(bound, out);
                if fresh {
                    bound.remove(v);
                }
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Visits every atom, including those under quantifiers.
    pub fn for_each_atom<'a>(&'a self, visit: &mut impl FnMut(&'a Relation, &'a [Term])) {
        match self {
            Formula::Atom(r, args) => visit(r, args),
            Formula::Not(f) => f.for_each_atom(visit),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.for_each_atom(visit)),
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.for_each_atom(visit),
        }
    }

    /// Every literal constant in the formula.
    pub fn constants(&self) -> Vec<&Value> {
        let mut out = Vec::new();
        self.for_each_atom(&mut |_, args| args.iter().for_each(|t| t.constants_into(&mut out)));
        out
    }
}

/// Top-level disjuncts after flattening nested disjunctions; anything else
/// is returned as a singleton.
pub fn disjuncts(phi: &Formula) -> Vec<Formula> {
    fn go(phi: &Formula, out: &mut Vec<Formula>) {
        match phi {
            Formula::Or(parts) if !parts.is_empty() => parts.iter().for_each(|p| go(p, out)),
            other => out.push(other.clone()),
        }
    }
    let mut out = Vec::new();
    go(phi, &mut out);
    out
}

/// Atom families and literal kinds a structure understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    Order,
    /// `+`, `0` and rational scaling.
    Arith,
    Projection,
    RationalLiterals,
    PairLiterals,
    P,
    Rn,
    Vle,
    Ann,
    Pow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub relations: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, usize>,
    pub builtins: BTreeSet<Builtin>,
}

impl Signature {
    pub fn new(name: &str, builtins: &[Builtin]) -> Signature {
        Signature {
            name: name.to_string(),
            relations: BTreeMap::new(),
            functions: BTreeMap::new(),
            builtins: builtins.iter().copied().collect(),
        }
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Signature {
        self.functions.insert(name.to_string(), arity);
        self
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Signature {
        self.relations.insert(name.to_string(), arity);
        self
    }

    pub fn has(&self, b: Builtin) -> bool {
        self.builtins.contains(&b)
    }

    /// Permissive signature accepting every builtin and `f/1`; used for
    /// round-trip tests and tooling that only manipulates syntax.
    pub fn everything() -> Signature {
        use Builtin::*;
        Signature::new(
            "any",
            &[Order, Arith, Projection, RationalLiterals, PairLiterals, P, Rn, Vle, Ann, Pow],
        )
        .with_function("f", 1)
    }
}

/// Finite map from variable names to elements.
pub type Assignment = BTreeMap<String, Value>;
