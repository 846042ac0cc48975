use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_formula, check_ict_certificate, check_tuples, holds, IctCertificate, IctError, InstanceSet};
use crate::formula::Formula;
use crate::structures::Structure;
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    pub max_pool: usize,
    pub max_size: usize,
    pub max_selections: u64,
    pub max_grid: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_pool: 8, max_size: 6, max_selections: 5_000_000, max_grid: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Random { seed: u64, tries: u64 },
}

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub element_var: String,
    pub phi: Formula,
    pub phi_params: Vec<String>,
    pub psi: Formula,
    pub psi_params: Vec<String>,
    pub pool_a: Vec<Vec<Value>>,
    pub pool_b: Vec<Vec<Value>>,
    pub m: usize,
    pub n: usize,
    pub mode: SearchMode,
    pub budget: Budget,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub certificate: Option<IctCertificate>,
    pub selections_tried: u64,
    /// True when an absent result covers every selection from the pools.
    pub exhaustive: bool,
    pub grid_size: usize,
    pub distinct_types: usize,
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((n - i) as u64) / (i as u64 + 1))
}

/// Columns of the realised (row-mask, column-mask) pairs with the first
/// grid point realising each.
struct TypeTable {
    types: Vec<(u64, u64, usize)>,
}

impl TypeTable {
    /// Witness for every cell of the selection, or None.
    fn cover(&self, rows: &[usize], cols: &[usize]) -> Option<Vec<Vec<usize>>> {
        let rmask: u64 = rows.iter().map(|&i| 1u64 << i).sum();
        let cmask: u64 = cols.iter().map(|&j| 1u64 << j).sum();
        let mut cells: Vec<Vec<Option<usize>>> = vec![vec![None; cols.len()]; rows.len()];
        let mut missing = rows.len() * cols.len();
        for &(ma, mb, g) in &self.types {
            let (ra, rb) = (ma & rmask, mb & cmask);
            if ra.count_ones() != 1 || rb.count_ones() != 1 {
                continue;
            }
            let i = rows.iter().position(|&r| ra == 1u64 << r).unwrap();
            let j = cols.iter().position(|&c| rb == 1u64 << c).unwrap();
            if cells[i][j].is_none() {
                cells[i][j] = Some(g);
                missing -= 1;
                if missing == 0 {
                    break;
                }
            }
        }
        (missing == 0).then(|| cells.into_iter().map(|r| r.into_iter().map(Option::unwrap).collect()).collect())
    }
}

/// Looks for an m × n ICT pattern whose rows and columns are drawn from the
/// pools. Truth values come from a single grid that is exact for every
/// selection at once, so an absent result in exhaustive mode is a proof that
/// no selection from these pools works. Selections are visited in
/// lexicographic order and the first one found is returned, independent of
/// the number of threads.
pub fn search_ict(s: &dyn Structure, spec: &SearchSpec) -> Result<SearchOutcome, IctError> {
    let x = &spec.element_var;
    check_formula(&spec.phi, x, &spec.phi_params, "phi")?;
    check_formula(&spec.psi, x, &spec.psi_params, "psi")?;
    check_tuples(&spec.pool_a, spec.phi_params.len(), "pool_a")?;
    check_tuples(&spec.pool_b, spec.psi_params.len(), "pool_b")?;
    let b = &spec.budget;
    let pool_cap = b.max_pool.min(64);
    if spec.pool_a.len() > pool_cap || spec.pool_b.len() > pool_cap {
        return Err(IctError::Budget(format!(
            "pool sizes {} and {} exceed the cap of {pool_cap}",
            spec.pool_a.len(),
            spec.pool_b.len()
        )));
    }
    if spec.m > b.max_size || spec.n > b.max_size {
        return Err(IctError::Budget(format!("pattern {}x{} exceeds max size {}", spec.m, spec.n, b.max_size)));
    }
    let total = binomial(spec.pool_a.len(), spec.m).saturating_mul(binomial(spec.pool_b.len(), spec.n));
    let planned = match spec.mode {
        SearchMode::Exhaustive => total,
        SearchMode::Random { tries, .. } => tries,
    };
    if planned > b.max_selections {
        return Err(IctError::Budget(format!("{planned} selections exceed the limit of {}", b.max_selections)));
    }

    let mut inst = InstanceSet::new();
    for a in &spec.pool_a {
        inst.push(&spec.phi, &spec.phi_params, a);
    }
    for bt in &spec.pool_b {
        inst.push(&spec.psi, &spec.psi_params, bt);
    }
    let grid = inst.grid(s, x)?;
    if grid.len() > b.max_grid {
        return Err(IctError::Budget(format!("grid of {} points exceeds {}", grid.len(), b.max_grid)));
    }
    let masks = grid
        .par_iter()
        .map(|c| -> Result<(u64, u64), IctError> {
            let mut ma = 0u64;
            for (i, a) in spec.pool_a.iter().enumerate() {
                if holds(s, &spec.phi, x, c, &spec.phi_params, a)? {
                    ma |= 1 << i;
                }
            }
            let mut mb = 0u64;
            for (j, bt) in spec.pool_b.iter().enumerate() {
                if holds(s, &spec.psi, x, c, &spec.psi_params, bt)? {
                    mb |= 1 << j;
                }
            }
            Ok((ma, mb))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut seen = std::collections::BTreeMap::new();
    for (g, &(ma, mb)) in masks.iter().enumerate() {
        seen.entry((ma, mb)).or_insert(g);
    }
    let mut types: Vec<(u64, u64, usize)> = seen.into_iter().map(|((a, b), g)| (a, b, g)).collect();
    types.sort_by_key(|t| t.2);
    let table = TypeTable { types };

    let row_sets: Vec<Vec<usize>>;
    let col_sets: Vec<Vec<usize>>;
    let selections: Vec<(usize, usize)>;
    match spec.mode {
        SearchMode::Exhaustive => {
            row_sets = (0..spec.pool_a.len()).combinations(spec.m).collect();
            col_sets = (0..spec.pool_b.len()).combinations(spec.n).collect();
            selections = Vec::new();
        }
        SearchMode::Random { seed, tries } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rs = Vec::new();
            let mut cs = Vec::new();
            if spec.m <= spec.pool_a.len() && spec.n <= spec.pool_b.len() {
                for _ in 0..tries {
                    let mut r = sample(&mut rng, spec.pool_a.len(), spec.m).into_vec();
                    let mut c = sample(&mut rng, spec.pool_b.len(), spec.n).into_vec();
                    r.sort_unstable();
                    c.sort_unstable();
                    rs.push(r);
                    cs.push(c);
                }
            }
            selections = (0..rs.len()).map(|t| (t, t)).collect();
            row_sets = rs;
            col_sets = cs;
        }
    }

    let found = match spec.mode {
        SearchMode::Exhaustive => row_sets.par_iter().find_map_first(|rows| {
            col_sets.iter().find_map(|cols| table.cover(rows, cols).map(|w| (rows.clone(), cols.clone(), w)))
        }),
        SearchMode::Random { .. } => selections.par_iter().find_map_first(|&(r, c)| {
            table.cover(&row_sets[r], &col_sets[c]).map(|w| (row_sets[r].clone(), col_sets[c].clone(), w))
        }),
    };
    let tried = match (&found, &spec.mode) {
        (None, _) => planned,
        (Some((rows, cols, _)), SearchMode::Exhaustive) => {
            let ri = row_sets.iter().position(|r| r == rows).unwrap() as u64;
            let ci = col_sets.iter().position(|c| c == cols).unwrap() as u64;
            ri * col_sets.len() as u64 + ci + 1
        }
        (Some((rows, cols, _)), SearchMode::Random { .. }) => {
            selections.iter().position(|&(r, c)| &row_sets[r] == rows && &col_sets[c] == cols).unwrap() as u64 + 1
        }
    };
    let certificate = match found {
        None => None,
        Some((rows, cols, w)) => {
            let cert = IctCertificate {
                structure: s.name().to_string(),
                element_var: x.clone(),
                phi: spec.phi.clone(),
                phi_params: spec.phi_params.clone(),
                psi: spec.psi.clone(),
                psi_params: spec.psi_params.clone(),
                a_params: rows.iter().map(|&i| spec.pool_a[i].clone()).collect(),
                b_params: cols.iter().map(|&j| spec.pool_b[j].clone()).collect(),
                witnesses: w.iter().map(|r| r.iter().map(|&g| grid[g].clone()).collect()).collect(),
            };
            if !check_ict_certificate(&cert, s)? {
                return Err(IctError::Precondition("search produced a certificate that fails its check".into()));
            }
            Some(cert)
        }
    };
    Ok(SearchOutcome {
        certificate,
        selections_tried: tried,
        exhaustive: matches!(spec.mode, SearchMode::Exhaustive),
        grid_size: grid.len(),
        distinct_types: table.types.len(),
    })
}
