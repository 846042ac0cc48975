//! Quantifier elimination for ℚ×ℚ under the lexicographic order with the
//! flip f((a, b)) = (−a, b).

mod block;
mod elim;
mod oracle;
mod term;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use block::{eliminate_exists, paper_rule, same_column, validated_rule, ExistsBlock};
pub use elim::{as_block, dnf, eliminate_all, eliminate_conjunction, eliminate_exists_qf, Literal, MAX_DISJUNCTS};
pub use oracle::{
    agreement_report, assignments, check_formula_against_oracle, oracle_points, random_block, regression_block,
    AgreementReport, Disagreement, FormulaCheck,
};
pub use term::{normalize_term, NormalTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Paper,
    Validated,
}

impl std::str::FromStr for Rule {
    type Err = String;
    fn from_str(s: &str) -> Result<Rule, String> {
        match s {
            "paper" => Ok(Rule::Paper),
            "validated" => Ok(Rule::Validated),
            other => Err(format!("unknown rule `{other}` (paper or validated)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum QeError {
    #[error("unsupported shape: {0}")]
    Unsupported(String),
    #[error("disjunctive form with {0} branches exceeds the limit")]
    TooLarge(usize),
    #[error(transparent)]
    Eval(#[from] crate::formula::EvalError),
}
