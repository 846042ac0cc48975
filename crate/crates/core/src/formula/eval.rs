use thiserror::Error;

use super::{Assignment, Formula, Term};
use crate::structures::Structure;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not assigned")]
    Unbound(String),
    #[error("{structure} does not interpret `{symbol}`")]
    NotInterpreted { structure: String, symbol: String },
    #[error("{structure}: expected {expected}, found {found}")]
    Type { structure: String, expected: String, found: String },
    #[error("{structure} cannot decide quantifiers exactly here: {reason}")]
    UnsupportedClass { structure: String, reason: String },
    #[error("precision exhausted: {0}")]
    Precision(String),
}

pub fn evaluate_term(s: &dyn Structure, t: &Term, a: &Assignment) -> Result<Value, EvalError> {
    s.eval_term(t, a)
}

/// Tarski semantics. Quantifiers range over the finite witness set returned by
/// the structure's endpoint-grid builder, which is exact for the formula
/// classes the structure accepts and an error otherwise.
pub fn evaluate(s: &dyn Structure, phi: &Formula, a: &Assignment) -> Result<bool, EvalError> {
    if let Some(v) = phi.free_vars().into_iter().find(|v| !a.contains_key(v)) {
        return Err(EvalError::Unbound(v));
    }
    let mut env = a.clone();
    eval_rec(s, phi, &mut env)
}

fn eval_rec(s: &dyn Structure, phi: &Formula, env: &mut Assignment) -> Result<bool, EvalError> {
    match phi {
        Formula::Atom(rel, args) => {
            let vals = args
                .iter()
                .map(|t| s.eval_term(t, env))
                .collect::<Result<Vec<_>, _>>()?;
            s.eval_atom(rel, &vals)
        }
        Formula::Not(f) => Ok(!eval_rec(s, f, env)?),
        Formula::And(fs) => {
            for f in fs {
                if !eval_rec(s, f, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(fs) => {
            for f in fs {
                if eval_rec(s, f, env)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let universal = matches!(phi, Formula::Forall(..));
            let grid = s.witness_grid(v, body, env)?;
            let saved = env.remove(v);
            let mut result = universal;
            for w in grid {
                env.insert(v.clone(), w);
                let holds = match eval_rec(s, body, env) {
                    Ok(h) => h,
                    Err(e) => {
                        restore(env, v, saved);
                        return Err(e);
                    }
                };
                if holds != universal {
                    result = !universal;
                    break;
                }
            }
            restore(env, v, saved);
            Ok(result)
        }
    }
}

fn restore(env: &mut Assignment, v: &str, saved: Option<Value>) {
    match saved {
        Some(val) => {
            env.insert(v.to_string(), val);
        }
        None => {
            env.remove(v);
        }
    }
}
