use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use super::QeError;
use crate::formula::{Assignment, Term};
use crate::rational::{rat, Rational};
use crate::structures::{lex_add, lex_flip, lex_scale, LexPoint};
use crate::value::Value;

/// Σ qᵢ·xᵢ + Σ rⱼ·f(xⱼ) + constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalTerm {
    pub linear: BTreeMap<String, Rational>,
    pub flipped: BTreeMap<String, Rational>,
    pub constant: LexPoint,
}

fn merge(a: &mut BTreeMap<String, Rational>, b: &BTreeMap<String, Rational>, q: &Rational) {
    for (v, c) in b {
        let e = a.entry(v.clone()).or_insert_with(Rational::zero);
        *e += c * q;
        if e.is_zero() {
            a.remove(v);
        }
    }
}

impl NormalTerm {
    pub fn zero() -> NormalTerm {
        NormalTerm::constant(LexPoint::zero())
    }

    pub fn constant(p: LexPoint) -> NormalTerm {
        NormalTerm { linear: BTreeMap::new(), flipped: BTreeMap::new(), constant: p }
    }

    pub fn var(name: &str) -> NormalTerm {
        let mut t = NormalTerm::zero();
        t.linear.insert(name.to_string(), Rational::one());
        t
    }

    pub fn add(&self, other: &NormalTerm) -> NormalTerm {
        let mut out = self.clone();
        merge(&mut out.linear, &other.linear, &Rational::one());
        merge(&mut out.flipped, &other.flipped, &Rational::one());
        out.constant = lex_add(&self.constant, &other.constant);
        out
    }

    pub fn scale(&self, q: &Rational) -> NormalTerm {
        if q.is_zero() {
            return NormalTerm::zero();
        }
        NormalTerm {
            linear: self.linear.iter().map(|(v, c)| (v.clone(), c * q)).collect(),
            flipped: self.flipped.iter().map(|(v, c)| (v.clone(), c * q)).collect(),
            constant: lex_scale(q, &self.constant),
        }
    }

    pub fn neg(&self) -> NormalTerm {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &NormalTerm) -> NormalTerm {
        self.add(&other.neg())
    }

    /// f applied to the whole term.
    pub fn flip(&self) -> NormalTerm {
        NormalTerm {
            linear: self.flipped.clone(),
            flipped: self.linear.clone(),
            constant: lex_flip(&self.constant),
        }
    }

    /// (u − f(u))/2, the point (first coordinate, 0).
    pub fn column(&self) -> NormalTerm {
        self.sub(&self.flip()).scale(&rat(1, 2))
    }

    /// (u + f(u))/2, the point (0, second coordinate).
    pub fn height(&self) -> NormalTerm {
        self.add(&self.flip()).scale(&rat(1, 2))
    }

    /// Coefficients of `x` and of `f(x)`.
    pub fn coefficients(&self, x: &str) -> (Rational, Rational) {
        let get = |m: &BTreeMap<String, Rational>| m.get(x).cloned().unwrap_or_else(Rational::zero);
        (get(&self.linear), get(&self.flipped))
    }

    pub fn without(&self, x: &str) -> NormalTerm {
        let mut out = self.clone();
        out.linear.remove(x);
        out.flipped.remove(x);
        out
    }

    pub fn mentions(&self, x: &str) -> bool {
        self.linear.contains_key(x) || self.flipped.contains_key(x)
    }

    pub fn is_ground(&self) -> bool {
        self.linear.is_empty() && self.flipped.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.linear.keys().chain(self.flipped.keys()).cloned().collect()
    }

    pub fn eval(&self, env: &Assignment) -> Option<LexPoint> {
        let mut acc = self.constant.clone();
        for (v, q) in &self.linear {
            acc = lex_add(&acc, &lex_scale(q, &LexPoint::from_value(env.get(v)?)?));
        }
        for (v, q) in &self.flipped {
            acc = lex_add(&acc, &lex_scale(q, &lex_flip(&LexPoint::from_value(env.get(v)?)?)));
        }
        Some(acc)
    }

    pub fn to_term(&self) -> Term {
        let mut parts: Vec<Term> = Vec::new();
        let scaled = |q: &Rational, t: Term| if q.is_one() { t } else { Term::scale(q.clone(), t) };
        for (v, q) in &self.linear {
            parts.push(scaled(q, Term::var(v)));
        }
        for (v, q) in &self.flipped {
            parts.push(scaled(q, Term::app("f", Term::var(v))));
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(if self.constant.is_zero() { Term::Zero } else { Term::Const(self.constant.to_value()) });
        }
        parts.into_iter().reduce(Term::add).unwrap()
    }
}

impl fmt::Display for NormalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// Pushes f down to variables and collects coefficients.
pub fn normalize_term(t: &Term) -> Result<NormalTerm, QeError> {
    Ok(match t {
        Term::Var(v) => NormalTerm::var(v),
        Term::Zero => NormalTerm::zero(),
        Term::Const(v) => match LexPoint::from_value(v) {
            Some(p) => NormalTerm::constant(p),
            None => match v {
                Value::Rat(q) if q.is_zero() => NormalTerm::zero(),
                _ => return Err(QeError::Unsupported(format!("literal `{v}` is not a pair"))),
            },
        },
        Term::Add(a, b) => normalize_term(a)?.add(&normalize_term(b)?),
        Term::Scale(q, inner) => normalize_term(inner)?.scale(q),
        Term::App(name, args) if name == "f" && args.len() == 1 => normalize_term(&args[0])?.flip(),
        Term::App(name, _) => return Err(QeError::Unsupported(format!("function `{name}`"))),
        Term::Proj(..) => return Err(QeError::Unsupported("projection".into())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_term;
    use crate::rational::int;
    use crate::structures::{QLexGroup, Structure};

    fn norm(text: &str) -> NormalTerm {
        normalize_term(&parse_term(text, QLexGroup::new().signature()).unwrap()).unwrap()
    }

    #[test]
    fn f_distributes() {
        let t = norm("f(x + (2)*y)");
        assert_eq!(t.coefficients("x"), (int(0), int(1)));
        assert_eq!(t.coefficients("y"), (int(0), int(2)));
        assert_eq!(norm("f(f(x))"), NormalTerm::var("x"));
        assert_eq!(norm("f((1,2))").constant, LexPoint::new(int(-1), int(2)));
    }

    #[test]
    fn column_and_height() {
        let env: Assignment = [("x".to_string(), Value::Pair(int(3), int(-5)))].into_iter().collect();
        let x = NormalTerm::var("x");
        assert_eq!(x.column().eval(&env), Some(LexPoint::new(int(3), int(0))));
        assert_eq!(x.height().eval(&env), Some(LexPoint::new(int(0), int(-5))));
    }

    #[test]
    fn cancellation_removes_variables() {
        assert!(norm("x + (-1)*x").is_ground());
        assert_eq!(norm("x + (-1)*x").to_term(), Term::Zero);
    }
}
