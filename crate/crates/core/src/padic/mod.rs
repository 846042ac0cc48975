//! Finite-precision p-adic numbers, the RV_k quotients, annuli, power
//! cosets and cells, and the search for cell-like levels.

mod approx;
mod cell;
mod celllike;
mod rv;

use rand::RngCore;

pub use approx::{inverse_mod, is_prime, pow, residue, vp, PadicApprox, PadicError};
pub use cell::{
    annulus_holds, brute_force_coset_count, coset_summary, hensel_modulus, in_cell, pow_holds,
    CellSpec, CosetSummary, PowerResidues,
};
pub use celllike::{check_celllike, count_violations, find_celllike_k, CelllikeK, CelllikeReport};
pub use rv::{check_prop61, pi_k, prop61_sides, random_padic, random_triple, Prop61Sides, Rv, RvClass};

use crate::formula::{Assignment, Builtin, EvalError, Formula, Relation, Signature, Term};
use crate::structures::{lookup, not_interpreted, type_error, Structure};
use crate::value::Value;

/// ℚ_p at a fixed relative precision, with valuation comparison, annulus and
/// power-coset atoms. Quantified formulas are rejected.
#[derive(Clone, Debug)]
pub struct PadicStructure {
    prime: u64,
    precision: u32,
    sig: Signature,
    name: String,
}

impl PadicStructure {
    pub fn new(prime: u64, precision: u32) -> Result<PadicStructure, PadicError> {
        if !is_prime(prime) {
            return Err(PadicError::NotPrime(prime));
        }
        use Builtin::*;
        Ok(PadicStructure {
            prime,
            precision,
            sig: Signature::new("padic", &[Arith, RationalLiterals, Vle, Ann, Pow]),
            name: format!("padic({prime})"),
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    fn elem(&self, v: &Value) -> Result<PadicApprox, EvalError> {
        match v {
            Value::Padic(x) if x.prime() == self.prime => Ok(x.clone()),
            Value::Rat(q) => Ok(PadicApprox::from_rational(self.prime, q, self.precision)),
            other => Err(type_error(&self.name, "p-adic number", other)),
        }
    }
}

fn precision_error(e: PadicError) -> EvalError {
    EvalError::Precision(e.to_string())
}

impl Structure for PadicStructure {
    fn name(&self) -> &str {
        &self.name
    }

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn eval_term(&self, t: &Term, env: &Assignment) -> Result<Value, EvalError> {
        let x = match t {
            Term::Var(v) => self.elem(&lookup(&self.name, env, v)?)?,
            Term::Zero => PadicApprox::zero(self.prime),
            Term::Const(v) => self.elem(v)?,
            Term::Add(a, b) => {
                self.elem(&self.eval_term(a, env)?)?.add(&self.elem(&self.eval_term(b, env)?)?)
            }
            Term::Scale(q, inner) => self.elem(&self.eval_term(inner, env)?)?.scale(q),
            Term::App(f, _) => return Err(not_interpreted(&self.name, f.clone())),
            Term::Proj(..) => return Err(not_interpreted(&self.name, "projection")),
        };
        Ok(Value::Padic(x))
    }

    fn eval_atom(&self, rel: &Relation, args: &[Value]) -> Result<bool, EvalError> {
        let xs = args.iter().map(|v| self.elem(v)).collect::<Result<Vec<_>, _>>()?;
        match rel {
            Relation::Eq => Ok(xs[0].sub(&xs[1]).is_zero()),
            Relation::Vle => match (xs[0].valuation(), xs[1].valuation()) {
                (Some(a), Some(b)) => Ok(a <= b),
                (Some(a), None) if a <= xs[1].absolute_precision() => Ok(true),
                (None, Some(b)) if xs[0].absolute_precision() > b => Ok(false),
                _ => Err(EvalError::Precision("valuation comparison near 0".into())),
            },
            Relation::Ann { upper, lower } => annulus_holds(&xs[0], *upper, *lower).map_err(precision_error),
            Relation::Pow { n, lambda } => pow_holds(&xs[0], *n, *lambda).map_err(precision_error),
            other => Err(not_interpreted(&self.name, format!("{other:?}"))),
        }
    }

    fn witness_grid(&self, _: &str, _: &Formula, _: &Assignment) -> Result<Vec<Value>, EvalError> {
        Err(EvalError::UnsupportedClass {
            structure: self.name.clone(),
            reason: "quantifiers over a valued field have no finite witness grid".into(),
        })
    }

    fn parse_value(&self, text: &str) -> Option<Value> {
        PadicApprox::parse(text, self.prime, self.precision).ok().map(Value::Padic)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Value {
        Value::Padic(random_padic(rng, self.prime, 0..=3, self.precision))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn celllike_examples() {
        let s = PadicStructure::new(3, 10).unwrap();
        let val0 = parse("Ann(x + (-1)*y0, 0, 0)", s.signature()).unwrap();
        let rep = check_celllike(&s, &val0, "x", "y0", 1, 500, 1);
        assert_eq!(rep.violations, 0);
        let cell = parse("Ann(x + (-1)*y0, 2, 0) & Pow(2, 1, x + (-1)*y0)", s.signature()).unwrap();
        let rep = check_celllike(&s, &cell, "x", "y0", 1, 500, 2);
        assert_eq!(rep.violations, 0);
        let eq = parse("x = y0 + 1", s.signature()).unwrap();
        let rep = check_celllike(&s, &eq, "x", "y0", 2, 500, 3);
        assert!(rep.violations > 0);
    }
}
