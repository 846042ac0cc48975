use std::fmt;

use num_traits::{One, Zero};
use rand::RngCore;

use super::{
    is_pure_order, lookup, not_interpreted, parse_pair, random_rational, type_error,
    visible_values, Structure,
};
use crate::formula::{Assignment, Builtin, EvalError, Formula, Relation, Signature, Term};
use crate::rational::{format_rational, midpoint, refine, Rational};
use crate::value::Value;

/// Point of ℚ×ℚ; the derived order is lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexPoint {
    pub first: Rational,
    pub second: Rational,
}

impl LexPoint {
    pub fn new(first: Rational, second: Rational) -> LexPoint {
        LexPoint { first, second }
    }

    pub fn zero() -> LexPoint {
        LexPoint::new(Rational::zero(), Rational::zero())
    }

    pub fn from_value(v: &Value) -> Option<LexPoint> {
        v.as_pair().map(|(a, b)| LexPoint::new(a.clone(), b.clone()))
    }

    pub fn to_value(&self) -> Value {
        Value::Pair(self.first.clone(), self.second.clone())
    }

    pub fn neg(&self) -> LexPoint {
        LexPoint::new(-&self.first, -&self.second)
    }

    pub fn sub(&self, other: &LexPoint) -> LexPoint {
        lex_add(self, &other.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.first.is_zero() && self.second.is_zero()
    }
}

impl fmt::Display for LexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.first), format_rational(&self.second))
    }
}

pub fn lex_add(a: &LexPoint, b: &LexPoint) -> LexPoint {
    LexPoint::new(&a.first + &b.first, &a.second + &b.second)
}

/// f((a, b)) = (−a, b)
pub fn lex_flip(a: &LexPoint) -> LexPoint {
    LexPoint::new(-&a.first, a.second.clone())
}

pub fn lex_scale(q: &Rational, a: &LexPoint) -> LexPoint {
    LexPoint::new(q * &a.first, q * &a.second)
}

/// ⟨ℚ×ℚ, <, +, (0,0), f, λ_q⟩ with the lexicographic order.
#[derive(Clone, Debug)]
pub struct QLexGroup {
    sig: Signature,
}

impl QLexGroup {
    pub fn new() -> QLexGroup {
        use Builtin::*;
        QLexGroup {
            sig: Signature::new("qlex", &[Order, Arith, PairLiterals]).with_function("f", 1),
        }
    }

    fn point(&self, v: &Value) -> Result<LexPoint, EvalError> {
        LexPoint::from_value(v).ok_or_else(|| type_error("qlex", "pair", v))
    }

    /// Per-column grid for a quantifier-free body. Each atom compares two
    /// terms that are affine in the bound variable, so the difference reads
    /// `(cα·a + K1, cβ·b + K2)` at x = (a, b). Sign changes happen only at
    /// the roots of those two coordinate maps, which are read off by
    /// evaluating the difference at three points.
    fn column_grid(
        &self,
        var: &str,
        body: &Formula,
        env: &Assignment,
    ) -> Result<Vec<Value>, EvalError> {
        let mut firsts = Vec::new();
        let mut seconds = Vec::new();
        for v in visible_values(var, body, env, LexPoint::zero().to_value()) {
            let p = self.point(&v)?;
            firsts.push(p.first);
            seconds.push(p.second);
        }
        let probes = [
            LexPoint::zero(),
            LexPoint::new(Rational::one(), Rational::zero()),
            LexPoint::new(Rational::zero(), Rational::one()),
        ];
        let mut scratch = env.clone();
        let mut failure = None;
        body.for_each_atom(&mut |_, args| {
            if failure.is_some() || args.len() != 2 || !(args[0].mentions(var) || args[1].mentions(var)) {
                return;
            }
            let mut diffs = Vec::with_capacity(3);
            for p in &probes {
                scratch.insert(var.to_string(), p.to_value());
                let l = self.eval_term(&args[0], &scratch).and_then(|v| self.point(&v));
                let r = self.eval_term(&args[1], &scratch).and_then(|v| self.point(&v));
                match (l, r) {
                    (Ok(l), Ok(r)) => diffs.push(r.sub(&l)),
                    (Err(e), _) | (_, Err(e)) => {
                        failure = Some(e);
                        return;
                    }
                }
            }
            let k = &diffs[0];
            let c_alpha = &diffs[1].first - &k.first;
            let c_beta = &diffs[2].second - &k.second;
            if !c_alpha.is_zero() {
                firsts.push(-&k.first / &c_alpha);
            }
            if !c_beta.is_zero() {
                seconds.push(-&k.second / &c_beta);
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let cols = refine(firsts);
        let rows = refine(seconds);
        let mut out = Vec::with_capacity(cols.len() * rows.len());
        for a in &cols {
            for b in &rows {
                out.push(Value::Pair(a.clone(), b.clone()));
            }
        }
        Ok(out)
    }

    /// Lexicographic endpoint grid for pure order bodies, which may nest
    /// further quantifiers.
    fn order_grid(&self, var: &str, body: &Formula, env: &Assignment) -> Result<Vec<Value>, EvalError> {
        let mut pts = visible_values(var, body, env, LexPoint::zero().to_value())
            .iter()
            .map(|v| self.point(v))
            .collect::<Result<Vec<_>, _>>()?;
        pts.sort();
        pts.dedup();
        if pts.is_empty() {
            return Ok(vec![LexPoint::zero().to_value()]);
        }
        let step = LexPoint::new(Rational::one(), Rational::zero());
        let mut out = vec![pts[0].sub(&step)];
        for w in pts.windows(2) {
            out.push(w[0].clone());
            out.push(LexPoint::new(midpoint(&w[0].first, &w[1].first), midpoint(&w[0].second, &w[1].second)));
        }
        let last = pts[pts.len() - 1].clone();
        out.push(lex_add(&last, &step));
        out.push(last);
        out.sort();
        Ok(out.into_iter().map(|p| p.to_value()).collect())
    }
}

impl Default for QLexGroup {
    fn default() -> Self {
        Self::new()
    }
}

impl Structure for QLexGroup {
    fn name(&self) -> &str {
        "qlex"
    }

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn eval_term(&self, t: &Term, env: &Assignment) -> Result<Value, EvalError> {
        let p = match t {
            Term::Var(v) => self.point(&lookup(self.name(), env, v)?)?,
            Term::Zero => LexPoint::zero(),
            Term::Const(v) => self.point(v)?,
            Term::Add(a, b) => {
                let a = self.point(&self.eval_term(a, env)?)?;
                let b = self.point(&self.eval_term(b, env)?)?;
                lex_add(&a, &b)
            }
            Term::Scale(q, inner) => lex_scale(q, &self.point(&self.eval_term(inner, env)?)?),
            Term::App(f, args) if f == "f" && args.len() == 1 => {
                lex_flip(&self.point(&self.eval_term(&args[0], env)?)?)
            }
            Term::App(f, _) => return Err(not_interpreted(self.name(), f.clone())),
            Term::Proj(..) => return Err(not_interpreted(self.name(), "projection")),
        };
        Ok(p.to_value())
    }

    fn eval_atom(&self, rel: &Relation, args: &[Value]) -> Result<bool, EvalError> {
        match rel {
            Relation::Lt => Ok(self.point(&args[0])? < self.point(&args[1])?),
            Relation::Eq => Ok(self.point(&args[0])? == self.point(&args[1])?),
            other => Err(not_interpreted(self.name(), format!("{other:?}"))),
        }
    }

    fn witness_grid(
        &self,
        var: &str,
        body: &Formula,
        env: &Assignment,
    ) -> Result<Vec<Value>, EvalError> {
        if body.is_quantifier_free() {
            self.column_grid(var, body, env)
        } else if is_pure_order(body) {
            self.order_grid(var, body, env)
        } else {
            Err(EvalError::UnsupportedClass {
                structure: self.name().to_string(),
                reason: "nested quantifier over a body with arithmetic or f".to_string(),
            })
        }
    }

    fn parse_value(&self, text: &str) -> Option<Value> {
        parse_pair(text).map(|(a, b)| Value::Pair(a, b))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Value {
        Value::Pair(random_rational(rng, 10, 4), random_rational(rng, 10, 4))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{evaluate, parse};
    use crate::rational::{int, rat};

    fn pt(a: i64, b: i64) -> LexPoint {
        LexPoint::new(int(a), int(b))
    }

    #[test]
    fn group_operations() {
        assert_eq!(lex_add(&pt(1, 2), &pt(3, 4)), pt(4, 6));
        assert_eq!(lex_add(&pt(1, -1), &pt(-1, 1)), pt(0, 0));
        assert_eq!(lex_flip(&pt(2, 3)), pt(-2, 3));
        assert_eq!(lex_flip(&pt(0, 5)), pt(0, 5));
        assert_eq!(lex_scale(&rat(1, 2), &pt(2, 4)), pt(1, 2));
        assert_eq!(lex_scale(&int(0), &pt(7, -3)), pt(0, 0));
        assert!(pt(0, 100) < pt(1, -100));
    }

    #[test]
    fn flip_fixes_column_zero() {
        let s = QLexGroup::new();
        let phi = parse("f(x) = x", s.signature()).unwrap();
        let env: Assignment = [("x".to_string(), pt(0, 3).to_value())].into_iter().collect();
        assert!(evaluate(&s, &phi, &env).unwrap());
        let env: Assignment = [("x".to_string(), pt(1, 3).to_value())].into_iter().collect();
        assert!(!evaluate(&s, &phi, &env).unwrap());
    }

    #[test]
    fn exists_inside_a_column() {
        let s = QLexGroup::new();
        let phi = parse("E x. ((0,0) < x & x < (0,1))", s.signature()).unwrap();
        assert!(evaluate(&s, &phi, &Assignment::new()).unwrap());
        let grid = s.witness_grid("x", &phi, &Assignment::new()).unwrap();
        assert!(grid.contains(&Value::Pair(int(0), rat(1, 2))));
    }

    #[test]
    fn boundary_column_witness() {
        let s = QLexGroup::new();
        let phi = parse("E x. ((0,0) < x & x < (1,0) & (0,0) < f(x) & f(x) < (1,0))", s.signature()).unwrap();
        assert!(evaluate(&s, &phi, &Assignment::new()).unwrap());
    }

    #[test]
    fn pure_order_nesting() {
        let s = QLexGroup::new();
        let dense = parse("A a. A b. (!(a < b) | (E x. (a < x & x < b)))", s.signature()).unwrap();
        assert!(evaluate(&s, &dense, &Assignment::new()).unwrap());
        let nested_f = parse("A a. E x. f(x) < a", s.signature()).unwrap();
        assert!(matches!(
            evaluate(&s, &nested_f, &Assignment::new()),
            Err(EvalError::UnsupportedClass { .. })
        ));
    }
}
