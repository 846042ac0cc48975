use std::fmt;

use super::elim::eliminate_exists_qf;
use super::term::NormalTerm;
use super::{QeError, Rule};
use crate::formula::{Formula, Term};

/// ∃x (s0 < x < s1 ∧ t0 < f(x) < t1); a missing bound is ±∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistsBlock {
    pub var: String,
    pub s0: Option<NormalTerm>,
    pub s1: Option<NormalTerm>,
    pub t0: Option<NormalTerm>,
    pub t1: Option<NormalTerm>,
}

impl ExistsBlock {
    pub fn unbounded(var: &str) -> ExistsBlock {
        ExistsBlock { var: var.to_string(), s0: None, s1: None, t0: None, t1: None }
    }

    pub fn new(
        var: &str,
        s0: Option<NormalTerm>,
        s1: Option<NormalTerm>,
        t0: Option<NormalTerm>,
        t1: Option<NormalTerm>,
    ) -> Result<ExistsBlock, QeError> {
        let b = ExistsBlock { var: var.to_string(), s0, s1, t0, t1 };
        if b.bounds().into_iter().flatten().any(|t| t.mentions(var)) {
            return Err(QeError::Unsupported(format!("a bound mentions `{var}`")));
        }
        Ok(b)
    }

    fn bounds(&self) -> [&Option<NormalTerm>; 4] {
        [&self.s0, &self.s1, &self.t0, &self.t1]
    }

    /// The quantifier-free matrix.
    pub fn body(&self) -> Formula {
        let x = Term::var(&self.var);
        let fx = Term::app("f", x.clone());
        let mut parts = Vec::new();
        if let Some(s0) = &self.s0 {
            parts.push(Formula::lt(s0.to_term(), x.clone()));
        }
        if let Some(s1) = &self.s1 {
            parts.push(Formula::lt(x.clone(), s1.to_term()));
        }
        if let Some(t0) = &self.t0 {
            parts.push(Formula::lt(t0.to_term(), fx.clone()));
        }
        if let Some(t1) = &self.t1 {
            parts.push(Formula::lt(fx, t1.to_term()));
        }
        Formula::And(parts)
    }

    pub fn to_formula(&self) -> Formula {
        Formula::exists(&self.var, self.body())
    }
}

impl fmt::Display for ExistsBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// (a = b) ∨ (a < b ∧ f(a) < f(b)) ∨ (b < a ∧ f(b) < f(a)): a and b share
/// their first coordinate.
pub fn same_column(a: &Term, b: &Term) -> Formula {
    let fa = Term::app("f", a.clone());
    let fb = Term::app("f", b.clone());
    Formula::Or(vec![
        Formula::eq(a.clone(), b.clone()),
        Formula::And(vec![Formula::lt(a.clone(), b.clone()), Formula::lt(fa.clone(), fb.clone())]),
        Formula::And(vec![Formula::lt(b.clone(), a.clone()), Formula::lt(fb, fa)]),
    ])
}

fn le(a: &Term, b: &Term) -> Formula {
    Formula::Or(vec![Formula::lt(a.clone(), b.clone()), Formula::eq(a.clone(), b.clone())])
}

fn implies(p: Formula, q: Formula) -> Formula {
    Formula::Or(vec![Formula::not(p), q])
}

/// The five-item conjunction exactly as stated, with f applied to s0 and s1
/// as written. Items that mention a missing bound are dropped.
pub fn paper_rule(b: &ExistsBlock) -> Formula {
    let term = |t: &Option<NormalTerm>| t.as_ref().map(NormalTerm::to_term);
    let (s0, s1, t0, t1) = (term(&b.s0), term(&b.s1), term(&b.t0), term(&b.t1));
    let f = |t: &Term| Term::app("f", t.clone());
    let mut items = Vec::new();
    if let (Some(s0), Some(s1)) = (&s0, &s1) {
        items.push(Formula::lt(s0.clone(), s1.clone()));
    }
    if let (Some(t0), Some(t1)) = (&t0, &t1) {
        items.push(Formula::lt(t0.clone(), t1.clone()));
    }
    if let (Some(s0), Some(s1), Some(t0), Some(t1)) = (&s0, &s1, &t0, &t1) {
        let (fs0, fs1) = (f(s0), f(s1));
        let phi_s = same_column(s0, s1);
        items.push(implies(phi_s.clone(), Formula::And(vec![le(t0, &fs0), le(&fs1, t1)])));
        items.push(implies(
            Formula::And(vec![
                Formula::not(phi_s.clone()),
                Formula::not(same_column(t0, &fs1)),
                Formula::not(same_column(t1, &fs0)),
            ]),
            Formula::And(vec![
                Formula::lt(fs1.clone(), t0.clone()),
                Formula::lt(t0.clone(), t1.clone()),
                Formula::lt(t1.clone(), fs0.clone()),
            ]),
        ));
        items.push(implies(
            Formula::And(vec![Formula::not(phi_s.clone()), same_column(t0, &fs1)]),
            Formula::And(vec![le(t0, &fs1), Formula::lt(t0.clone(), t1.clone())]),
        ));
        items.push(implies(
            Formula::And(vec![Formula::not(phi_s), same_column(t1, &fs0)]),
            Formula::And(vec![le(&fs0, t1), Formula::lt(t0.clone(), t1.clone())]),
        ));
    }
    Formula::And(items)
}

/// Exact elimination by coordinates: each lexicographic comparison splits
/// into a column condition and a height condition, and each axis is a dense
/// order without endpoints.
pub fn validated_rule(b: &ExistsBlock) -> Result<Formula, QeError> {
    eliminate_exists_qf(&b.var, &b.body(), Rule::Validated)
}

pub fn eliminate_exists(b: &ExistsBlock, rule: Rule) -> Result<Formula, QeError> {
    match rule {
        Rule::Paper => Ok(paper_rule(b)),
        Rule::Validated => validated_rule(b),
    }
}
