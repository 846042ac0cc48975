//! ICT patterns: certificates, exact checking, bounded search, disjunct
//! refinement, single-formula fusion, inp patterns and breakpoint profiles.

mod breakpoints;
mod inp;
mod refine;
mod search;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use breakpoints::{breakpoint_profile, BreakpointProfile};
pub use inp::{check_inp_certificate, InpCertificate};
pub use refine::{fuse_single_formula, refine_disjunct, Refinement};
pub use search::{search_ict, Budget, SearchMode, SearchOutcome, SearchSpec};

use crate::formula::{evaluate, parse, substitute, Assignment, EvalError, Formula, ParseError, Term};
use crate::structures::{by_name, Structure};
use crate::value::Value;

#[derive(Debug, Error)]
pub enum IctError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("unknown structure `{0}`")]
    UnknownStructure(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("formula does not parse: {0}")]
    Parse(#[from] ParseError),
    #[error("certificate file: {0}")]
    Toml(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no disjunct supports two or more rows")]
    NoDisjunct,
}

/// A 2 × m × n ICT pattern with explicit witnesses; `witnesses[i][j]`
/// realises row i and column j and no other row or column.
#[derive(Clone, Debug, PartialEq)]
pub struct IctCertificate {
    pub structure: String,
    pub element_var: String,
    pub phi: Formula,
    pub phi_params: Vec<String>,
    pub psi: Formula,
    pub psi_params: Vec<String>,
    pub a_params: Vec<Vec<Value>>,
    pub b_params: Vec<Vec<Value>>,
    pub witnesses: Vec<Vec<Value>>,
}

impl IctCertificate {
    pub fn rows(&self) -> usize {
        self.a_params.len()
    }

    pub fn cols(&self) -> usize {
        self.b_params.len()
    }

    fn validate(&self) -> Result<(), IctError> {
        check_formula(&self.phi, &self.element_var, &self.phi_params, "phi")?;
        check_formula(&self.psi, &self.element_var, &self.psi_params, "psi")?;
        check_tuples(&self.a_params, self.phi_params.len(), "a_params")?;
        check_tuples(&self.b_params, self.psi_params.len(), "b_params")?;
        if self.witnesses.len() != self.rows() || self.witnesses.iter().any(|r| r.len() != self.cols()) {
            return Err(IctError::Malformed(format!(
                "witness table must be {} x {}",
                self.rows(),
                self.cols()
            )));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        let file = CertificateFile {
            structure: self.structure.clone(),
            element_var: self.element_var.clone(),
            phi: self.phi.to_string(),
            phi_params: self.phi_params.clone(),
            psi: self.psi.to_string(),
            psi_params: self.psi_params.clone(),
            a_params: strings(&self.a_params),
            b_params: strings(&self.b_params),
            witnesses: strings(&self.witnesses),
        };
        toml::to_string(&file).expect("certificate serializes")
    }

    pub fn from_toml(text: &str) -> Result<IctCertificate, IctError> {
        let file: CertificateFile = toml::from_str(text).map_err(|e| IctError::Toml(e.to_string()))?;
        let s = by_name(&file.structure).ok_or_else(|| IctError::UnknownStructure(file.structure.clone()))?;
        let cert = IctCertificate {
            phi: parse(&file.phi, s.signature())?,
            psi: parse(&file.psi, s.signature())?,
            a_params: values(s.as_ref(), &file.a_params)?,
            b_params: values(s.as_ref(), &file.b_params)?,
            witnesses: values(s.as_ref(), &file.witnesses)?,
            structure: file.structure,
            element_var: file.element_var,
            phi_params: file.phi_params,
            psi_params: file.psi_params,
        };
        cert.validate()?;
        Ok(cert)
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    structure: String,
    element_var: String,
    phi: String,
    phi_params: Vec<String>,
    psi: String,
    psi_params: Vec<String>,
    a_params: Vec<Vec<String>>,
    b_params: Vec<Vec<String>>,
    witnesses: Vec<Vec<String>>,
}

fn strings(table: &[Vec<Value>]) -> Vec<Vec<String>> {
    table.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect()
}

fn values(s: &dyn Structure, table: &[Vec<String>]) -> Result<Vec<Vec<Value>>, IctError> {
    table
        .iter()
        .map(|r| {
            r.iter()
                .map(|t| s.parse_value(t).ok_or_else(|| IctError::Malformed(format!("bad element `{t}`"))))
                .collect()
        })
        .collect()
}

pub(crate) fn check_formula(phi: &Formula, x: &str, params: &[String], label: &str) -> Result<(), IctError> {
    let distinct: BTreeSet<&String> = params.iter().collect();
    if distinct.len() != params.len() || distinct.contains(&x.to_string()) {
        return Err(IctError::Malformed(format!("{label}: parameter names must be distinct from each other and from `{x}`")));
    }
    for v in phi.free_vars() {
        if v != x && !distinct.contains(&v) {
            return Err(IctError::Malformed(format!("{label}: free variable `{v}` is not declared")));
        }
    }
    Ok(())
}

pub(crate) fn check_tuples(tuples: &[Vec<Value>], width: usize, label: &str) -> Result<(), IctError> {
    if let Some(t) = tuples.iter().find(|t| t.len() != width) {
        return Err(IctError::Malformed(format!("{label}: tuple of length {} where {width} expected", t.len())));
    }
    Ok(())
}

/// Truth of φ(c; ā).
pub(crate) fn holds(
    s: &dyn Structure,
    phi: &Formula,
    x: &str,
    c: &Value,
    params: &[String],
    tuple: &[Value],
) -> Result<bool, EvalError> {
    let mut env: Assignment = params.iter().cloned().zip(tuple.iter().cloned()).collect();
    env.insert(x.to_string(), c.clone());
    evaluate(s, phi, &env)
}

/// One formula instantiated at many parameter tuples, with the parameters
/// renamed apart so all instances can share a single body and assignment.
/// Its witness grid is exact for every instance at once.
pub struct InstanceSet {
    pub body: Formula,
    pub env: Assignment,
}

impl InstanceSet {
    #[allow(clippy::new_without_default)]
    pub fn new() -> InstanceSet {
        InstanceSet { body: Formula::truth(), env: Assignment::new() }
    }

    pub fn push(&mut self, phi: &Formula, params: &[String], tuple: &[Value]) {
        let mut inst = phi.clone();
        for (p, v) in params.iter().zip(tuple) {
            let name = format!("_{}_{}", p, self.env.len());
            inst = substitute(&inst, p, &Term::Var(name.clone()));
            self.env.insert(name, v.clone());
        }
        if let Formula::And(parts) = &mut self.body {
            parts.push(inst);
        }
    }

    /// Candidate values for `x` meeting every cell the instances induce.
    pub fn grid(&self, s: &dyn Structure, x: &str) -> Result<Vec<Value>, EvalError> {
        s.witness_grid(x, &self.body, &self.env)
    }
}

/// Exact validity check. Every witness must satisfy its own row and column
/// and falsify every other row and column.
pub fn check_ict_certificate(cert: &IctCertificate, s: &dyn Structure) -> Result<bool, IctError> {
    cert.validate()?;
    Ok(first_failure(cert, s)?.is_none())
}

/// The first cell whose witness fails, if any.
pub fn first_failure(cert: &IctCertificate, s: &dyn Structure) -> Result<Option<(usize, usize)>, IctError> {
    cert.validate()?;
    let x = &cert.element_var;
    for (i, row) in cert.witnesses.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            for (l, a) in cert.a_params.iter().enumerate() {
                if holds(s, &cert.phi, x, w, &cert.phi_params, a)? != (l == i) {
                    return Ok(Some((i, j)));
                }
            }
            for (k, b) in cert.b_params.iter().enumerate() {
                if holds(s, &cert.psi, x, w, &cert.psi_params, b)? != (k == j) {
                    return Ok(Some((i, j)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::structures::PairDlo;

    pub(crate) fn strip_cert(m: usize) -> IctCertificate {
        let s = PairDlo::new();
        let sig = s.signature();
        let r = |a: i64| Value::Rat(int(a));
        IctCertificate {
            structure: "pair_dlo".into(),
            element_var: "x".into(),
            phi: parse("a < x.1 & x.1 < b", sig).unwrap(),
            phi_params: vec!["a".into(), "b".into()],
            psi: parse("c < x.2 & x.2 < d", sig).unwrap(),
            psi_params: vec!["c".into(), "d".into()],
            a_params: (0..m as i64).map(|i| vec![r(2 * i), r(2 * i + 1)]).collect(),
            b_params: (0..m as i64).map(|j| vec![r(2 * j), r(2 * j + 1)]).collect(),
            witnesses: (0..m as i64)
                .map(|i| {
                    (0..m as i64)
                        .map(|j| Value::Pair(crate::rational::rat(4 * i + 1, 2), crate::rational::rat(4 * j + 1, 2)))
                        .collect()
                })
                .collect(),
        }
    }

    #[test]
    fn strips_are_valid_and_round_trip() {
        let cert = strip_cert(3);
        let s = PairDlo::new();
        assert!(check_ict_certificate(&cert, &s).unwrap());
        let back = IctCertificate::from_toml(&cert.to_toml()).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn moved_witness_is_caught() {
        let mut cert = strip_cert(2);
        cert.witnesses[1][0] = cert.witnesses[0][0].clone();
        assert_eq!(first_failure(&cert, &PairDlo::new()).unwrap(), Some((1, 0)));
    }

    #[test]
    fn undeclared_parameter() {
        let mut cert = strip_cert(2);
        cert.phi_params.pop();
        assert!(matches!(check_ict_certificate(&cert, &PairDlo::new()), Err(IctError::Malformed(_))));
    }
}
