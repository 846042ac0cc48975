use std::collections::BTreeSet;

use super::{check_ict_certificate, holds, IctCertificate, IctError, InstanceSet};
use crate::formula::{disjuncts, fresh_name, substitute, Formula, Term};
use crate::structures::Structure;

#[derive(Clone, Debug)]
pub struct Refinement {
    /// 1-based index of the chosen disjunct.
    pub disjunct: usize,
    pub rows: Vec<usize>,
    /// Rows each disjunct supports, in disjunct order.
    pub support: Vec<Vec<usize>>,
    pub certificate: IctCertificate,
}

/// Chooses one disjunct of φ that alone carries at least two rows of the
/// pattern. A row counts for disjunct l when every column has a witness
/// satisfying φ_l on that row, ψ on that column, and the full ¬φ and ¬ψ on
/// every other row and column of the original pattern.
pub fn refine_disjunct(cert: &IctCertificate, s: &dyn Structure) -> Result<Refinement, IctError> {
    if !check_ict_certificate(cert, s)? {
        return Err(IctError::Precondition("input certificate is not valid".into()));
    }
    let x = &cert.element_var;
    let parts = disjuncts(&cert.phi);
    let mut inst = InstanceSet::new();
    for a in &cert.a_params {
        inst.push(&cert.phi, &cert.phi_params, a);
    }
    for b in &cert.b_params {
        inst.push(&cert.psi, &cert.psi_params, b);
    }
    // Disjuncts may carry atoms the full formula hides behind others, so
    // their instances join the grid too.
    for d in &parts {
        for a in &cert.a_params {
            inst.push(d, &cert.phi_params, a);
        }
    }
    let grid = inst.grid(s, x)?;
    let mut phi_table = Vec::with_capacity(grid.len());
    let mut psi_table = Vec::with_capacity(grid.len());
    for c in &grid {
        let mut row = Vec::with_capacity(cert.rows());
        for a in &cert.a_params {
            row.push(holds(s, &cert.phi, x, c, &cert.phi_params, a)?);
        }
        phi_table.push(row);
        let mut col = Vec::with_capacity(cert.cols());
        for b in &cert.b_params {
            col.push(holds(s, &cert.psi, x, c, &cert.psi_params, b)?);
        }
        psi_table.push(col);
    }
    let isolated = |v: &[bool], k: usize| v.iter().enumerate().all(|(l, &t)| t == (l == k) || l == k);

    let mut support = Vec::with_capacity(parts.len());
    let mut witnesses = Vec::with_capacity(parts.len());
    for d in &parts {
        let mut rows = Vec::new();
        let mut wit = Vec::new();
        for (i, a) in cert.a_params.iter().enumerate() {
            let mut row_w = Vec::with_capacity(cert.cols());
            for j in 0..cert.cols() {
                let mut hit = None;
                for (g, c) in grid.iter().enumerate() {
                    if psi_table[g][j]
                        && isolated(&psi_table[g], j)
                        && isolated(&phi_table[g], i)
                        && holds(s, d, x, c, &cert.phi_params, a)?
                    {
                        hit = Some(c.clone());
                        break;
                    }
                }
                match hit {
                    Some(c) => row_w.push(c),
                    None => break,
                }
            }
            if row_w.len() == cert.cols() {
                rows.push(i);
                wit.push(row_w);
            }
        }
        support.push(rows);
        witnesses.push(wit);
    }
    let best = (0..parts.len())
        .filter(|&l| support[l].len() >= 2)
        .max_by(|&l, &k| support[l].len().cmp(&support[k].len()).then(k.cmp(&l)))
        .ok_or(IctError::NoDisjunct)?;
    let rows = support[best].clone();
    let certificate = IctCertificate {
        phi: parts[best].clone(),
        a_params: rows.iter().map(|&i| cert.a_params[i].clone()).collect(),
        witnesses: witnesses[best].clone(),
        ..cert.clone()
    };
    if !check_ict_certificate(&certificate, s)? {
        return Err(IctError::Precondition("refined certificate fails its check".into()));
    }
    Ok(Refinement { disjunct: best + 1, rows, support, certificate })
}

/// Turns an m × m pattern for (φ, ψ) with m even into an (m/2) × (m/2)
/// pattern for the single formula θ(x; ȳ1, ȳ2) = φ(x; ȳ1) ∨ ψ(x; ȳ2), used
/// on both sides. Row i pairs the i-th rows of both halves; column j pairs
/// the (m/2 + j)-th ones. The witness of cell (i, j) is the old witness at
/// (i, m/2 + j).
pub fn fuse_single_formula(cert: &IctCertificate, s: &dyn Structure) -> Result<IctCertificate, IctError> {
    let m = cert.rows();
    if m != cert.cols() || m % 2 != 0 || m == 0 {
        return Err(IctError::Precondition(format!("need an m x m pattern with m even, got {m} x {}", cert.cols())));
    }
    if !check_ict_certificate(cert, s)? {
        return Err(IctError::Precondition("input certificate is not valid".into()));
    }
    let mut taken: BTreeSet<String> = cert.phi_params.iter().chain(&cert.psi_params).cloned().collect();
    taken.insert(cert.element_var.clone());
    let mut params = Vec::new();
    let mut rename = |phi: &Formula, ps: &[String], suffix: &str, taken: &mut BTreeSet<String>| {
        let mut out = phi.clone();
        for p in ps {
            let mut name = format!("{p}{suffix}");
            if taken.contains(&name) {
                name = fresh_name(&name, taken);
            }
            taken.insert(name.clone());
            out = substitute(&out, p, &Term::Var(name.clone()));
            params.push(name);
        }
        out
    };
    let phi1 = rename(&cert.phi, &cert.phi_params, "_1", &mut taken);
    let psi2 = rename(&cert.psi, &cert.psi_params, "_2", &mut taken);
    let theta = Formula::or(vec![phi1, psi2]);
    let h = m / 2;
    let joined = |k: usize| [cert.a_params[k].clone(), cert.b_params[k].clone()].concat();
    let fused = IctCertificate {
        structure: cert.structure.clone(),
        element_var: cert.element_var.clone(),
        phi: theta.clone(),
        phi_params: params.clone(),
        psi: theta,
        psi_params: params,
        a_params: (0..h).map(joined).collect(),
        b_params: (h..m).map(joined).collect(),
        witnesses: (0..h).map(|i| (0..h).map(|j| cert.witnesses[i][h + j].clone()).collect()).collect(),
    };
    if !check_ict_certificate(&fused, s)? {
        return Err(IctError::Precondition("fused certificate fails its check".into()));
    }
    Ok(fused)
}
