use rand::RngCore;

use super::{lookup, not_interpreted, random_rational, type_error, visible_values, Structure};
use crate::formula::{Assignment, Builtin, EvalError, Formula, Relation, Signature, Term};
use crate::rational::{parse_rational, refine, Rational};
use crate::value::Value;

/// (ℚ, <).
#[derive(Clone, Debug)]
pub struct SimpleDlo {
    sig: Signature,
}

impl SimpleDlo {
    pub fn new() -> SimpleDlo {
        SimpleDlo { sig: Signature::new("simple_dlo", &[Builtin::Order, Builtin::RationalLiterals]) }
    }

    fn rat(&self, v: &Value) -> Result<Rational, EvalError> {
        v.as_rat().cloned().ok_or_else(|| type_error("simple_dlo", "rational", v))
    }
}

impl Default for SimpleDlo {
    fn default() -> Self {
        Self::new()
    }
}

impl Structure for SimpleDlo {
    fn name(&self) -> &str {
        "simple_dlo"
    }

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn eval_term(&self, t: &Term, env: &Assignment) -> Result<Value, EvalError> {
        match t {
            Term::Var(v) => {
                let val = lookup(self.name(), env, v)?;
                self.rat(&val).map(Value::Rat)
            }
            Term::Zero => Ok(Value::Rat(Rational::from_integer(0.into()))),
            Term::Const(Value::Rat(q)) => Ok(Value::Rat(q.clone())),
            Term::Const(other) => Err(type_error(self.name(), "rational", other)),
            Term::Add(..) => Err(not_interpreted(self.name(), "+")),
            Term::Scale(..) => Err(not_interpreted(self.name(), "scaling")),
            Term::App(f, _) => Err(not_interpreted(self.name(), f.clone())),
            Term::Proj(..) => Err(not_interpreted(self.name(), "projection")),
        }
    }

    fn eval_atom(&self, rel: &Relation, args: &[Value]) -> Result<bool, EvalError> {
        match rel {
            Relation::Lt => Ok(self.rat(&args[0])? < self.rat(&args[1])?),
            Relation::Eq => Ok(self.rat(&args[0])? == self.rat(&args[1])?),
            other => Err(not_interpreted(self.name(), format!("{other:?}"))),
        }
    }

    fn witness_grid(
        &self,
        var: &str,
        body: &Formula,
        env: &Assignment,
    ) -> Result<Vec<Value>, EvalError> {
        // Terms are variables and literals only, so every formula is a pure
        // order formula and the visible values are the only breakpoints.
        let pts = visible_values(var, body, env, Value::Rat(Rational::from_integer(0.into())))
            .iter()
            .map(|v| self.rat(v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(refine(pts).into_iter().map(Value::Rat).collect())
    }

    fn parse_value(&self, text: &str) -> Option<Value> {
        parse_rational(text).map(Value::Rat)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Value {
        Value::Rat(random_rational(rng, 10, 4))
    }
}
