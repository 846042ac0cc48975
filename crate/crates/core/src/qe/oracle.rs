use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::block::{eliminate_exists, ExistsBlock};
use super::term::NormalTerm;
use super::Rule;
use crate::formula::{evaluate, Assignment, Formula};
use crate::rational::{int, rat};
use crate::structures::{LexPoint, QLexGroup};


/// First `n` points of (−1,−1), (−1,0), (−1,1), (0,−1), … in column-major
/// order, so small grids already put several points in one column.
pub fn oracle_points(n: usize) -> Vec<LexPoint> {
    (0..n as i64).map(|k| LexPoint::new(int(k / 3 - 1), int(k % 3 - 1))).collect()
}

/// Every assignment of the variables to grid points, in lexicographic order.
pub fn assignments(vars: &[String], points: &[LexPoint]) -> Vec<Assignment> {
    if vars.is_empty() {
        return vec![Assignment::new()];
    }
    (0..vars.len())
        .map(|_| points.iter())
        .multi_cartesian_product()
        .map(|combo| vars.iter().cloned().zip(combo.into_iter().map(LexPoint::to_value)).collect())
        .collect()
}

fn random_pair<R: Rng + ?Sized>(rng: &mut R) -> LexPoint {
    let second = if rng.gen_ratio(1, 4) { rat(rng.gen_range(-4..=4), 2) } else { int(rng.gen_range(-2..=2)) };
    LexPoint::new(int(rng.gen_range(-2..=2)), second)
}

fn random_bound<R: Rng + ?Sized>(rng: &mut R) -> Option<NormalTerm> {
    let y = NormalTerm::var("y");
    let z = NormalTerm::var("z");
    let c = NormalTerm::constant(random_pair(rng));
    Some(match rng.gen_range(0..20) {
        0 | 1 => return None,
        2..=8 => c,
        9 | 10 => y,
        11 => z,
        12 | 13 => y.flip(),
        14 | 15 => y.add(&c),
        16 => z.flip().add(&c),
        17 => y.scale(&int(2)),
        _ => y.flip().add(&c),
    })
}

/// A block over the free variables y and z.
pub fn random_block<R: Rng + ?Sized>(rng: &mut R) -> ExistsBlock {
    ExistsBlock {
        var: "x".into(),
        s0: random_bound(rng),
        s1: random_bound(rng),
        t0: random_bound(rng),
        t1: random_bound(rng),
    }
}

/// s0 = (0,0), s1 = (1,0), t0 = (0,0), t1 = (1,0): satisfiable by x = (0,1).
pub fn regression_block() -> ExistsBlock {
    let p = |a: i64, b: i64| Some(NormalTerm::constant(LexPoint::new(int(a), int(b))));
    ExistsBlock { var: "x".into(), s0: p(0, 0), s1: p(1, 0), t0: p(0, 0), t1: p(1, 0) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub block_index: usize,
    pub block: String,
    pub assignment: String,
    pub oracle: bool,
    pub rule: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub rule: Rule,
    pub blocks: usize,
    pub assignments_checked: usize,
    pub errors: Vec<String>,
    pub disagreements: Vec<Disagreement>,
}

impl AgreementReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty() && self.errors.is_empty()
    }

    pub fn flags_block(&self, index: usize) -> bool {
        self.disagreements.iter().any(|d| d.block_index == index)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("block_index,assignment,oracle,rule_value\n");
        for d in &self.disagreements {
            out.push_str(&format!("{},\"{}\",{},{}\n", d.block_index, d.assignment, d.oracle, d.rule));
        }
        out
    }
}

fn show(env: &Assignment) -> String {
    env.iter().map(|(k, v)| format!("{k}={v}")).join("; ")
}

/// Compares the rule's output with exact evaluation of the block on every
/// assignment of its free variables to the first `grid` oracle points.
pub fn agreement_report(blocks: &[ExistsBlock], rule: Rule, grid: usize) -> AgreementReport {
    let s = QLexGroup::new();
    let points = oracle_points(grid);
    let per_block: Vec<(usize, Vec<String>, Vec<Disagreement>)> = blocks
        .par_iter()
        .enumerate()
        .map(|(i, b)| {
            let phi = b.to_formula();
            let vars: Vec<String> = phi.free_vars().into_iter().collect();
            let envs = assignments(&vars, &points);
            let out = match eliminate_exists(b, rule) {
                Ok(f) => f,
                Err(e) => return (envs.len(), vec![format!("block {i}: {e}")], Vec::new()),
            };
            let mut errors = Vec::new();
            let mut dis = Vec::new();
            for env in &envs {
                match (evaluate(&s, &phi, env), evaluate(&s, &out, env)) {
                    (Ok(o), Ok(r)) if o != r => dis.push(Disagreement {
                        block_index: i,
                        block: b.to_string(),
                        assignment: show(env),
                        oracle: o,
                        rule: r,
                    }),
                    (Ok(_), Ok(_)) => {}
                    (Err(e), _) | (_, Err(e)) => errors.push(format!("block {i} at {}: {e}", show(env))),
                }
            }
            (envs.len(), errors, dis)
        })
        .collect();
    let mut rep = AgreementReport {
        rule,
        blocks: blocks.len(),
        assignments_checked: 0,
        errors: Vec::new(),
        disagreements: Vec::new(),
    };
    for (n, e, d) in per_block {
        rep.assignments_checked += n;
        rep.errors.extend(e);
        rep.disagreements.extend(d);
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub assignments: usize,
    pub disagreements: Vec<String>,
    pub undecided: usize,
}

/// Exact evaluation of `original` against `eliminated` on the oracle grid.
/// Assignments where the original cannot be evaluated exactly are counted
/// as undecided.
pub fn check_formula_against_oracle(original: &Formula, eliminated: &Formula, grid: usize) -> FormulaCheck {
    let s = QLexGroup::new();
    let vars: Vec<String> = original.free_vars().union(&eliminated.free_vars()).cloned().collect();
    let envs = assignments(&vars, &oracle_points(grid));
    let results: Vec<Option<Option<String>>> = envs
        .par_iter()
        .map(|env| match (evaluate(&s, original, env), evaluate(&s, eliminated, env)) {
            (Ok(o), Ok(r)) if o != r => Some(Some(format!("{}: oracle {o}, eliminated {r}", show(env)))),
            (Ok(_), Ok(_)) => Some(None),
            _ => None,
        })
        .collect();
    FormulaCheck {
        assignments: envs.len(),
        undecided: results.iter().filter(|r| r.is_none()).count(),
        disagreements: results.into_iter().flatten().flatten().collect(),
    }
}

