use rand::RngCore;

use super::{lookup, not_interpreted, parse_pair, random_rational, type_error, visible_values, Structure};
use crate::formula::{Assignment, Builtin, EvalError, Formula, Relation, Signature, Term};
use crate::rational::{int, parse_rational, Rational};
use crate::value::Value;

/// A point of ℚ×ℚ read through two unrelated coordinate orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairPoint {
    pub first: Rational,
    pub second: Rational,
}

impl PairPoint {
    pub fn new(first: Rational, second: Rational) -> PairPoint {
        PairPoint { first, second }
    }

    pub fn into_value(self) -> Value {
        Value::Pair(self.first, self.second)
    }
}

/// Elements are pairs; the only atoms compare coordinates (`x.1 < a`,
/// `x.2 = y.2`), so the structure is two dense orders glued side by side.
/// Rational-valued parameters are allowed in assignments.
#[derive(Clone, Debug)]
pub struct PairDlo {
    sig: Signature,
}

impl PairDlo {
    pub fn new() -> PairDlo {
        use Builtin::*;
        PairDlo {
            sig: Signature::new("pair_dlo", &[Order, Projection, RationalLiterals, PairLiterals]),
        }
    }
}

impl Default for PairDlo {
    fn default() -> Self {
        Self::new()
    }
}

/// Sorted points with two interior points per gap and two beyond each end,
/// so any two new coordinates can realize every order type over `points`.
fn refine_twice(points: Vec<Rational>) -> Vec<Rational> {
    let mut pts = points;
    pts.sort();
    pts.dedup();
    if pts.is_empty() {
        return vec![int(0), int(1)];
    }
    let mut out = Vec::with_capacity(3 * pts.len() + 4);
    let first = pts[0].clone();
    out.push(&first - int(2));
    out.push(&first - int(1));
    for w in pts.windows(2) {
        out.push(w[0].clone());
        let third = (&w[1] - &w[0]) / int(3);
        out.push(&w[0] + &third);
        out.push(&w[1] - &third);
    }
    let last = pts[pts.len() - 1].clone();
    out.push(last.clone());
    out.push(&last + int(1));
    out.push(last + int(2));
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
    out
}

impl Structure for PairDlo {
    fn name(&self) -> &str {
        "pair_dlo"
    }

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn eval_term(&self, t: &Term, env: &Assignment) -> Result<Value, EvalError> {
        match t {
            Term::Var(v) => lookup(self.name(), env, v),
            Term::Zero => Ok(Value::Rat(int(0))),
            Term::Const(v @ (Value::Rat(_) | Value::Pair(..))) => Ok(v.clone()),
            Term::Const(other) => Err(type_error(self.name(), "rational or pair", other)),
            Term::Proj(i, inner) => match self.eval_term(inner, env)? {
                Value::Pair(a, b) => Ok(Value::Rat(if *i == 1 { a } else { b })),
                other => Err(type_error(self.name(), "pair", &other)),
            },
            Term::Add(..) => Err(not_interpreted(self.name(), "+")),
            Term::Scale(..) => Err(not_interpreted(self.name(), "scaling")),
            Term::App(f, _) => Err(not_interpreted(self.name(), f.clone())),
        }
    }

    fn eval_atom(&self, rel: &Relation, args: &[Value]) -> Result<bool, EvalError> {
        match rel {
            Relation::Lt => {
                let a = args[0].as_rat().ok_or_else(|| type_error(self.name(), "rational", &args[0]))?;
                let b = args[1].as_rat().ok_or_else(|| type_error(self.name(), "rational", &args[1]))?;
                Ok(a < b)
            }
            Relation::Eq => {
                if args[0].kind() != args[1].kind() {
                    return Err(type_error(self.name(), args[0].kind(), &args[1]));
                }
                Ok(args[0] == args[1])
            }
            other => Err(not_interpreted(self.name(), format!("{other:?}"))),
        }
    }

    fn witness_grid(
        &self,
        var: &str,
        body: &Formula,
        env: &Assignment,
    ) -> Result<Vec<Value>, EvalError> {
        let mut coords = Vec::new();
        for v in visible_values(var, body, env, Value::Rat(int(0))) {
            match v {
                Value::Rat(q) => coords.push(q),
                Value::Pair(a, b) => {
                    coords.push(a);
                    coords.push(b);
                }
                other => return Err(type_error(self.name(), "rational or pair", &other)),
            }
        }
        let g = refine_twice(coords);
        let mut out = Vec::with_capacity(g.len() * g.len());
        for a in &g {
            for b in &g {
                out.push(Value::Pair(a.clone(), b.clone()));
            }
        }
        Ok(out)
    }

    fn parse_value(&self, text: &str) -> Option<Value> {
        if let Some((a, b)) = parse_pair(text) {
            return Some(Value::Pair(a, b));
        }
        parse_rational(text).map(Value::Rat)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Value {
        Value::Pair(random_rational(rng, 10, 4), random_rational(rng, 10, 4))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{evaluate, parse};
    use crate::rational::rat;

    #[test]
    fn coordinates_are_independent() {
        let s = PairDlo::new();
        let phi = parse("E x. (a < x.1 & x.1 < b & c < x.2 & x.2 < d)", s.signature()).unwrap();
        let grid = [rat(0, 1), rat(1, 2), rat(3, 1), rat(-7, 3)];
        for a in &grid {
            for b in &grid {
                for c in &grid {
                    for d in &grid {
                        if a < b && c < d {
                            let env: Assignment = [("a", a), ("b", b), ("c", c), ("d", d)]
                                .into_iter()
                                .map(|(k, v)| (k.to_string(), Value::Rat(v.clone())))
                                .collect();
                            assert!(evaluate(&s, &phi, &env).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn nested_quantifiers_see_coordinate_order() {
        let s = PairDlo::new();
        let phi = parse("E x. (x.1 < x.2 & (A y. (!(y.1 < x.2) | y.1 < x.1 | x.1 < y.1 | y.1 = x.1)))", s.signature());
        let phi = phi.unwrap();
        assert!(evaluate(&s, &phi, &Assignment::new()).unwrap());
        let between = parse("E x. (E y. (x.1 < y.1 & y.1 < x.2))", s.signature()).unwrap();
        assert!(evaluate(&s, &between, &Assignment::new()).unwrap());
    }

    #[test]
    fn order_only_on_coordinates() {
        let s = PairDlo::new();
        let phi = parse("x < y", s.signature()).unwrap();
        let env: Assignment = [
            ("x".to_string(), Value::Pair(rat(0, 1), rat(0, 1))),
            ("y".to_string(), Value::Pair(rat(1, 1), rat(1, 1))),
        ]
        .into_iter()
        .collect();
        assert!(matches!(evaluate(&s, &phi, &env), Err(EvalError::Type { .. })));
    }
}
