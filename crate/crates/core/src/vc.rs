//! Δ-type counting over finite parameter sets and growth profiles.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::formula::{evaluate, Assignment, EvalError, Formula, Term};
use crate::ict::{IctCertificate, InstanceSet};
use crate::rational::int;
use crate::structures::Structure;
use crate::value::Value;

/// φ(x; ȳ) with its parameter variables in order.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaFormula {
    pub formula: Formula,
    pub params: Vec<String>,
}

impl DeltaFormula {
    pub fn new(formula: Formula, params: &[&str]) -> DeltaFormula {
        DeltaFormula { formula, params: params.iter().map(|p| p.to_string()).collect() }
    }
}

/// Realised Δ-types: one bit per (formula, tuple) instance, each vector
/// stored with the first grid element that realises it.
#[derive(Clone, Debug)]
pub struct TypeTable {
    pub instances: Vec<(usize, Vec<Value>)>,
    pub types: Vec<(Vec<bool>, Value)>,
    pub grid_size: usize,
}

impl TypeTable {
    pub fn count(&self) -> usize {
        self.types.len()
    }
}

/// Counts types over explicit (formula index, tuple) instances. The grid is
/// exact for the conjunction of all instances, so it meets every cell of the
/// partition they induce. `extra_refinement` rounds of refinement feed the
/// current grid back in as extra breakpoints; the count must not change.
pub fn count_instances(
    s: &dyn Structure,
    x: &str,
    deltas: &[DeltaFormula],
    instances: Vec<(usize, Vec<Value>)>,
    extra_refinement: usize,
) -> Result<TypeTable, EvalError> {
    let mut inst = InstanceSet::new();
    for (d, tuple) in &instances {
        inst.push(&deltas[*d].formula, &deltas[*d].params, tuple);
    }
    let mut grid = inst.grid(s, x)?;
    for round in 0..extra_refinement {
        let mut parts = vec![inst.body.clone()];
        for (k, g) in grid.iter().enumerate() {
            let name = format!("_grid{round}_{k}");
            let atom = Formula::eq(Term::var(x), Term::var(&name));
            parts.push(Formula::or(vec![atom.clone(), Formula::not(atom)]));
            inst.env.insert(name, g.clone());
        }
        inst.body = Formula::And(parts);
        grid = inst.grid(s, x)?;
    }
    let merged = grid
        .par_chunks(64)
        .enumerate()
        .map(|(chunk, pts)| -> Result<BTreeMap<Vec<bool>, usize>, EvalError> {
            let mut local = BTreeMap::new();
            for (k, c) in pts.iter().enumerate() {
                let mut bits = Vec::with_capacity(instances.len());
                for (d, tuple) in &instances {
                    let delta = &deltas[*d];
                    let mut env: Assignment = delta.params.iter().cloned().zip(tuple.iter().cloned()).collect();
                    env.insert(x.to_string(), c.clone());
                    bits.push(evaluate(s, &delta.formula, &env)?);
                }
                local.entry(bits).or_insert(chunk * 64 + k);
            }
            Ok(local)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                let e = a.entry(k).or_insert(v);
                *e = (*e).min(v);
            }
            Ok(a)
        })?;
    let mut types: Vec<(Vec<bool>, usize)> = merged.into_iter().collect();
    types.sort_by_key(|t| t.1);
    Ok(TypeTable {
        instances,
        types: types.into_iter().map(|(b, g)| (b, grid[g].clone())).collect(),
        grid_size: grid.len(),
    })
}

/// Every formula instantiated with every tuple of elements of matching width.
pub fn all_instances(deltas: &[DeltaFormula], elements: &[Value]) -> Vec<(usize, Vec<Value>)> {
    let mut out = Vec::new();
    for (d, delta) in deltas.iter().enumerate() {
        let k = delta.params.len();
        if k == 0 {
            out.push((d, Vec::new()));
            continue;
        }
        for tuple in (0..k).map(|_| elements.iter().cloned()).multi_cartesian_product() {
            out.push((d, tuple));
        }
    }
    out
}

/// |S^Δ(A)| with parameters drawn from the element set A.
pub fn count_delta_types(
    s: &dyn Structure,
    x: &str,
    deltas: &[DeltaFormula],
    elements: &[Value],
) -> Result<TypeTable, EvalError> {
    count_instances(s, x, deltas, all_instances(deltas, elements), 0)
}

/// Types of {φ, ψ} over the certificate's own parameter families.
pub fn ict_linkage_count(cert: &IctCertificate, s: &dyn Structure) -> Result<usize, EvalError> {
    let deltas = [
        DeltaFormula { formula: cert.phi.clone(), params: cert.phi_params.clone() },
        DeltaFormula { formula: cert.psi.clone(), params: cert.psi_params.clone() },
    ];
    let instances = cert
        .a_params
        .iter()
        .map(|a| (0, a.clone()))
        .chain(cert.b_params.iter().map(|b| (1, b.clone())))
        .collect();
    Ok(count_instances(s, &cert.element_var, &deltas, instances, 0)?.count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    /// 1..N along the diagonal (pairs) or the line.
    UniformGrid,
    /// Two families of N/2 points: (i, i) and (j, N/2 + 1 − j).
    TwoFamily,
    /// N distinct seeded samples.
    Random,
}

pub fn build_elements(s: &dyn Structure, recipe: Recipe, size: usize, seed: u64) -> Vec<Value> {
    let pairs = matches!(s.name(), "pair_dlo" | "qlex");
    let point = |a: i64, b: i64| if pairs { Value::Pair(int(a), int(b)) } else { Value::Rat(int(a)) };
    let n = size as i64;
    match recipe {
        Recipe::UniformGrid => (1..=n).map(|i| point(i, i)).collect(),
        Recipe::TwoFamily if pairs => {
            let h = n / 2;
            let mut out: Vec<Value> = (1..=h).map(|i| point(i, i)).collect();
            out.extend((1..=n - h).map(|j| point(j, h + 1 - j)));
            out
        }
        Recipe::TwoFamily => (1..=n).map(|i| point(i, i)).collect(),
        Recipe::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ size as u64);
            let mut out: Vec<Value> = Vec::with_capacity(size);
            let mut guard = 0;
            while out.len() < size && guard < 1000 * size.max(1) {
                let v = s.sample(&mut rng);
                if !out.contains(&v) {
                    out.push(v);
                }
                guard += 1;
            }
            out
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VcRow {
    pub size: usize,
    pub elements: usize,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VcProfile {
    pub structure: String,
    pub delta_id: String,
    pub rows: Vec<VcRow>,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    /// max(count / size) over the run; no uniform bound is claimed.
    pub max_ratio: f64,
}

impl VcProfile {
    pub fn csv(&self) -> String {
        let mut out = String::from("structure,delta_id,size,exact_count,fitted_slope\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{:.6}\n", self.structure, self.delta_id, r.size, r.count, self.slope));
        }
        out
    }
}

/// Ordinary least squares of ln(count) on ln(size): (slope, intercept, residuals).
pub fn fit_loglog(points: &[(usize, usize)]) -> (f64, f64, Vec<f64>) {
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.1 as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    (slope, intercept, residuals)
}

#[derive(Debug, thiserror::Error)]
pub enum VcError {
    #[error("sizes must be strictly increasing with at least two entries")]
    Sizes,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub fn vc_density_profile(
    s: &dyn Structure,
    x: &str,
    deltas: &[DeltaFormula],
    delta_id: &str,
    recipe: Recipe,
    sizes: &[usize],
    seed: u64,
) -> Result<VcProfile, VcError> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(VcError::Sizes);
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let elements = build_elements(s, recipe, size, seed);
        let count = count_delta_types(s, x, deltas, &elements)?.count();
        rows.push(VcRow { size, elements: elements.len(), count });
    }
    let points: Vec<(usize, usize)> = rows.iter().map(|r| (r.size, r.count)).collect();
    let (slope, intercept, residuals) = fit_loglog(&points);
    let max_ratio = rows.iter().map(|r| r.count as f64 / r.size as f64).fold(0.0, f64::max);
    Ok(VcProfile { structure: s.name().to_string(), delta_id: delta_id.to_string(), rows, slope, intercept, residuals, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::structures::{PairDlo, SimpleDlo};

    #[test]
    fn cuts_on_the_line() {
        let s = SimpleDlo::new();
        let d = [DeltaFormula::new(parse("x < y", s.signature()).unwrap(), &["y"])];
        let a: Vec<Value> = (1..=5).map(|i| Value::Rat(int(i))).collect();
        let t = count_delta_types(&s, "x", &d, &a).unwrap();
        assert_eq!(t.count(), 6);
        let finer = count_instances(&s, "x", &d, all_instances(&d, &a), 2).unwrap();
        assert_eq!(finer.count(), 6);
        assert!(finer.grid_size > t.grid_size);
    }

    #[test]
    fn empty_delta_has_one_type() {
        let s = PairDlo::new();
        let a = build_elements(&s, Recipe::UniformGrid, 4, 0);
        assert_eq!(count_delta_types(&s, "x", &[], &a).unwrap().count(), 1);
    }

    #[test]
    fn fit_exact_power() {
        let (slope, _, res) = fit_loglog(&[(2, 8), (4, 64), (8, 512)]);
        assert!((slope - 3.0).abs() < 1e-9);
        assert!(res.iter().all(|r| r.abs() < 1e-9));
    }
}
