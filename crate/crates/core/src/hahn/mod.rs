//! Finite-support Hahn series over ℚ as an ordered ℚ-vector space with the
//! predicate P (integer valuation) and the alternation relations R_n.

mod axioms;
mod classes;
mod series;

use rand::RngCore;

pub use axioms::{axiom8_witness, axiom8p_witness, axiom_suite, random_series, AxiomReport, AxiomResult};
pub use classes::{
    check_lemma51, class_of, compute_rn, hseries_p, lemma51_scalars, rn_chain_oracle,
    same_component, strictly_smaller_class, ClassId, Lemma51Report,
};
pub use series::HahnSeries;

use crate::formula::{Assignment, Builtin, EvalError, Formula, Relation, Signature, Term};
use crate::structures::Structure;
use crate::value::Value;

/// The series group as an evaluable structure. Atoms are exact; quantified
/// formulas are rejected because no witness grid is known for P and R_n.
#[derive(Clone, Debug)]
pub struct HahnStructure {
    sig: Signature,
}

impl HahnStructure {
    pub fn new() -> HahnStructure {
        use Builtin::*;
        HahnStructure { sig: Signature::new("hahn", &[Order, Arith, RationalLiterals, P, Rn]) }
    }

    fn series(&self, v: &Value) -> Result<HahnSeries, EvalError> {
        match v {
            Value::Series(s) => Ok(s.clone()),
            Value::Rat(q) => Ok(HahnSeries::monomial(q.clone(), crate::rational::int(0))),
            other => Err(crate::structures::type_error("hahn", "series", other)),
        }
    }
}

impl Default for HahnStructure {
    fn default() -> Self {
        Self::new()
    }
}

impl Structure for HahnStructure {
    fn name(&self) -> &str {
        "hahn"
    }

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn eval_term(&self, t: &Term, env: &Assignment) -> Result<Value, EvalError> {
        let s = match t {
            Term::Var(v) => self.series(&crate::structures::lookup("hahn", env, v)?)?,
            Term::Zero => HahnSeries::zero(),
            Term::Const(v) => self.series(v)?,
            Term::Add(a, b) => {
                self.series(&self.eval_term(a, env)?)?.add(&self.series(&self.eval_term(b, env)?)?)
            }
            Term::Scale(q, inner) => self.series(&self.eval_term(inner, env)?)?.scale(q),
            Term::App(f, _) => return Err(crate::structures::not_interpreted("hahn", f.clone())),
            Term::Proj(..) => return Err(crate::structures::not_interpreted("hahn", "projection")),
        };
        Ok(Value::Series(s))
    }

    fn eval_atom(&self, rel: &Relation, args: &[Value]) -> Result<bool, EvalError> {
        let xs = args.iter().map(|v| self.series(v)).collect::<Result<Vec<_>, _>>()?;
        match rel {
            Relation::Lt => Ok(xs[0] < xs[1]),
            Relation::Eq => Ok(xs[0] == xs[1]),
            Relation::P => Ok(hseries_p(&xs[0])),
            Relation::R(n) => Ok(compute_rn(&xs[0], &xs[1]) == Some(u64::from(*n))),
            other => Err(crate::structures::not_interpreted("hahn", format!("{other:?}"))),
        }
    }

    fn witness_grid(&self, _: &str, _: &Formula, _: &Assignment) -> Result<Vec<Value>, EvalError> {
        Err(EvalError::UnsupportedClass {
            structure: "hahn".into(),
            reason: "quantifiers over P and R_n have no exact witness grid".into(),
        })
    }

    fn parse_value(&self, text: &str) -> Option<Value> {
        HahnSeries::parse(text).map(Value::Series)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Value {
        Value::Series(random_series(rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{evaluate, parse};

    #[test]
    fn atoms_over_series() {
        let s = HahnStructure::new();
        let env: Assignment = [
            ("x".to_string(), s.parse_value("1 * t^(1)").unwrap()),
            ("y".to_string(), s.parse_value("1 * t^(3/4)").unwrap()),
        ]
        .into_iter()
        .collect();
        let phi = parse("P(x) & !P(y) & R1(x, y) & x < y", s.signature()).unwrap();
        assert!(evaluate(&s, &phi, &env).unwrap());
        let q = parse("E z. P(z)", s.signature()).unwrap();
        assert!(matches!(evaluate(&s, &q, &env), Err(EvalError::UnsupportedClass { .. })));
    }
}
