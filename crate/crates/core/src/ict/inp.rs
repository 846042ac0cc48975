use itertools::Itertools;

use super::{check_formula, check_tuples, holds, IctError, InstanceSet};
use crate::formula::{evaluate, Assignment, Formula};
use crate::structures::Structure;
use crate::value::Value;

/// Two-row inp pattern: row φ is k0-inconsistent, row ψ is k1-inconsistent,
/// and every path is realised by `witnesses[i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct InpCertificate {
    pub structure: String,
    pub element_var: String,
    pub phi: Formula,
    pub phi_params: Vec<String>,
    pub psi: Formula,
    pub psi_params: Vec<String>,
    pub k0: usize,
    pub k1: usize,
    pub a_params: Vec<Vec<Value>>,
    pub b_params: Vec<Vec<Value>>,
    pub witnesses: Vec<Vec<Value>>,
}

/// Conjunction of the row instances indexed by `subset`, decided exactly.
fn consistent(
    s: &dyn Structure,
    phi: &Formula,
    x: &str,
    params: &[String],
    rows: &[Vec<Value>],
    subset: &[usize],
) -> Result<bool, IctError> {
    let mut inst = InstanceSet::new();
    for &i in subset {
        inst.push(phi, params, &rows[i]);
    }
    let closed = Formula::exists(x, inst.body.clone());
    let env: Assignment = inst.env;
    Ok(evaluate(s, &closed, &env)?)
}

fn row_inconsistent(
    s: &dyn Structure,
    phi: &Formula,
    x: &str,
    params: &[String],
    rows: &[Vec<Value>],
    k: usize,
    budget: &mut u64,
) -> Result<bool, IctError> {
    if k == 0 {
        return Ok(false);
    }
    for subset in (0..rows.len()).combinations(k) {
        if *budget == 0 {
            return Err(IctError::Budget("subset budget exhausted".into()));
        }
        *budget -= 1;
        if consistent(s, phi, x, params, rows, &subset)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact check. Inconsistency is decided by evaluating ∃x of each k-subset
/// conjunction; `max_subsets` bounds the number of subsets examined.
pub fn check_inp_certificate(cert: &InpCertificate, s: &dyn Structure, max_subsets: u64) -> Result<bool, IctError> {
    let x = &cert.element_var;
    check_formula(&cert.phi, x, &cert.phi_params, "phi")?;
    check_formula(&cert.psi, x, &cert.psi_params, "psi")?;
    check_tuples(&cert.a_params, cert.phi_params.len(), "a_params")?;
    check_tuples(&cert.b_params, cert.psi_params.len(), "b_params")?;
    if cert.witnesses.len() != cert.a_params.len()
        || cert.witnesses.iter().any(|r| r.len() != cert.b_params.len())
    {
        return Err(IctError::Malformed("witness table does not match the rows".into()));
    }
    for (i, row) in cert.witnesses.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            if !holds(s, &cert.phi, x, w, &cert.phi_params, &cert.a_params[i])?
                || !holds(s, &cert.psi, x, w, &cert.psi_params, &cert.b_params[j])?
            {
                return Ok(false);
            }
        }
    }
    let mut budget = max_subsets;
    Ok(row_inconsistent(s, &cert.phi, x, &cert.phi_params, &cert.a_params, cert.k0, &mut budget)?
        && row_inconsistent(s, &cert.psi, x, &cert.psi_params, &cert.b_params, cert.k1, &mut budget)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::rational::{int, rat};
    use crate::structures::PairDlo;

    fn strips(overlap: bool) -> InpCertificate {
        let s = PairDlo::new();
        let r = |a: i64| Value::Rat(int(a));
        let width = if overlap { 3 } else { 1 };
        InpCertificate {
            structure: "pair_dlo".into(),
            element_var: "x".into(),
            phi: parse("a < x.1 & x.1 < b", s.signature()).unwrap(),
            phi_params: vec!["a".into(), "b".into()],
            psi: parse("c < x.2 & x.2 < d", s.signature()).unwrap(),
            psi_params: vec!["c".into(), "d".into()],
            k0: 2,
            k1: 2,
            a_params: (0..3).map(|i| vec![r(2 * i), r(2 * i + width)]).collect(),
            b_params: (0..3).map(|j| vec![r(2 * j), r(2 * j + 1)]).collect(),
            witnesses: (0..3)
                .map(|i| (0..3).map(|j| Value::Pair(rat(4 * i + 1, 2), rat(4 * j + 1, 2))).collect())
                .collect(),
        }
    }

    #[test]
    fn disjoint_strips() {
        assert!(check_inp_certificate(&strips(false), &PairDlo::new(), 1000).unwrap());
    }

    #[test]
    fn overlapping_strips() {
        assert!(!check_inp_certificate(&strips(true), &PairDlo::new(), 1000).unwrap());
    }

    #[test]
    fn subset_budget() {
        assert!(matches!(check_inp_certificate(&strips(false), &PairDlo::new(), 2), Err(IctError::Budget(_))));
    }
}
