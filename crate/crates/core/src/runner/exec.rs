use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Expect, ExperimentConfig, Kind};
use super::{Check, Outcome, RunError};
use crate::formula::{parse, Formula};
use crate::hahn::{axiom_suite, check_lemma51, compute_rn, random_series, rn_chain_oracle};
use crate::ict::{
    breakpoint_profile, check_inp_certificate, search_ict, IctError, InpCertificate, SearchSpec,
};
use crate::padic::{check_prop61, find_celllike_k, random_triple, PadicError};
use crate::qe::{
    agreement_report, check_formula_against_oracle, eliminate_all, random_block, regression_block, ExistsBlock,
};
use crate::structures::{by_name, Structure};
use crate::value::Value;
use crate::vc::{ict_linkage_count, vc_density_profile, DeltaFormula};

pub(crate) fn execute(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    match cfg.kind {
        Kind::IctSearch => ict_search(cfg),
        Kind::InpCheck => inp_check(cfg),
        Kind::Breakpoints => breakpoints(cfg),
        Kind::VcProfile => vc_profile(cfg),
        Kind::Qe => qe(cfg),
        Kind::HahnVerify => hahn_verify(cfg),
        Kind::PadicVerify => padic_verify(cfg),
    }
}

fn structure(cfg: &ExperimentConfig) -> Result<Box<dyn Structure>, RunError> {
    let name = cfg.structure.as_deref().unwrap_or("");
    by_name(name).ok_or_else(|| RunError::Config(format!("unknown structure `{name}`")))
}

fn formula(s: &dyn Structure, text: &str) -> Result<Formula, RunError> {
    parse(text, s.signature()).map_err(|e| RunError::Config(format!("formula `{text}`: {e}")))
}

fn value(s: &dyn Structure, text: &str) -> Result<Value, RunError> {
    s.parse_value(text).ok_or_else(|| RunError::Config(format!("`{text}` is not an element of {}", s.name())))
}

fn table(s: &dyn Structure, rows: &[Vec<String>]) -> Result<Vec<Vec<Value>>, RunError> {
    rows.iter().map(|r| r.iter().map(|t| value(s, t)).collect()).collect()
}

fn ict_error(e: IctError) -> RunError {
    match e {
        IctError::Budget(m) => RunError::Budget(m),
        other => RunError::Config(other.to_string()),
    }
}

fn ict_search(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let s = structure(cfg)?;
    let c = cfg.ict.as_ref().unwrap();
    let (pool_a, pool_b) = if c.endpoint_grid.is_empty() {
        (table(s.as_ref(), &c.pool_a)?, table(s.as_ref(), &c.pool_b)?)
    } else {
        let grid: Vec<Value> = c.endpoint_grid.iter().map(|t| value(s.as_ref(), t)).collect::<Result<_, _>>()?;
        let pairs: Vec<Vec<Value>> =
            grid.iter().flat_map(|a| grid.iter().map(move |b| vec![a.clone(), b.clone()])).collect();
        (pairs.clone(), pairs)
    };
    let spec = SearchSpec {
        element_var: c.element_var.clone(),
        phi: formula(s.as_ref(), &c.phi)?,
        phi_params: c.phi_params.clone(),
        psi: formula(s.as_ref(), &c.psi)?,
        psi_params: c.psi_params.clone(),
        pool_a,
        pool_b,
        m: c.m,
        n: c.n,
        mode: cfg.search_mode(),
        budget: c.budget.clone(),
    };
    let out = search_ict(s.as_ref(), &spec).map_err(ict_error)?;
    let mut o = Outcome::default();
    let result = match (&out.certificate, out.exhaustive) {
        (Some(_), _) => "present",
        (None, true) => "absent (exhaustive)",
        (None, false) => "absent (sampled)",
    };
    let linkage = match &out.certificate {
        Some(cert) => Some(ict_linkage_count(cert, s.as_ref()).map_err(|e| RunError::Config(e.to_string()))?),
        None => None,
    };
    o.notes.push(format!("result: {result}"));
    o.notes.push(format!("selections tried: {}, grid points: {}, joint types: {}", out.selections_tried, out.grid_size, out.distinct_types));
    if let Some(cert) = &out.certificate {
        o.notes.push("certificate:".into());
        o.notes.extend(cert.to_toml().lines().map(|l| format!("  {l}")));
        o.checks.push(Check::new("certificate verified", true, "check_ict_certificate returned true"));
        let count = linkage.unwrap();
        o.checks.push(Check::new(
            "type count covers the pattern",
            count >= c.m * c.n,
            format!("{count} types over the certificate parameters, m*n = {}", c.m * c.n),
        ));
    }
    if let Some(expect) = c.expect {
        let ok = match expect {
            Expect::Present => out.certificate.is_some(),
            Expect::Absent => out.certificate.is_none() && out.exhaustive,
        };
        o.checks.push(Check::new("expected outcome", ok, format!("expected {expect:?}, got {result}")));
    }
    o.csv = format!(
        "structure,m,n,mode,result,selections_tried,grid_size,distinct_types,linkage_count\n{},{},{},{},{},{},{},{},{}\n",
        s.name(),
        c.m,
        c.n,
        c.mode,
        result,
        out.selections_tried,
        out.grid_size,
        out.distinct_types,
        linkage.map_or(String::new(), |n| n.to_string())
    );
    Ok(o)
}

fn inp_check(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let s = structure(cfg)?;
    let c = cfg.inp.as_ref().unwrap();
    let cert = InpCertificate {
        structure: s.name().to_string(),
        element_var: c.element_var.clone(),
        phi: formula(s.as_ref(), &c.phi)?,
        phi_params: c.phi_params.clone(),
        psi: formula(s.as_ref(), &c.psi)?,
        psi_params: c.psi_params.clone(),
        k0: c.k0,
        k1: c.k1,
        a_params: table(s.as_ref(), &c.a_params)?,
        b_params: table(s.as_ref(), &c.b_params)?,
        witnesses: table(s.as_ref(), &c.witnesses)?,
    };
    let valid = check_inp_certificate(&cert, s.as_ref(), c.max_subsets).map_err(ict_error)?;
    let mut o = Outcome::default();
    o.checks.push(Check::new("inp validity", valid == c.expect_valid, format!("valid = {valid}, expected {}", c.expect_valid)));
    o.csv = format!(
        "structure,rows,cols,k0,k1,valid\n{},{},{},{},{},{}\n",
        s.name(),
        cert.a_params.len(),
        cert.b_params.len(),
        c.k0,
        c.k1,
        valid
    );
    Ok(o)
}

fn breakpoints(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let s = structure(cfg)?;
    let c = cfg.breakpoints.as_ref().unwrap();
    let deltas: Vec<Formula> = c.deltas.iter().map(|d| formula(s.as_ref(), d)).collect::<Result<_, _>>()?;
    let point = value(s.as_ref(), &c.c)?;
    let seq = table(s.as_ref(), &c.sequence)?;
    let prof = breakpoint_profile(s.as_ref(), &deltas, &c.element_var, &point, &c.tuple_vars, &seq)
        .map_err(ict_error)?;
    let mut o = Outcome::default();
    o.notes.push(format!("{} blocks, {} breakpoints", prof.blocks.len(), prof.breakpoints()));
    if let Some(n) = c.expect_blocks {
        o.checks.push(Check::new("block count", prof.blocks.len() == n, format!("{} blocks, expected {n}", prof.blocks.len())));
    }
    o.checks.push(Check::new(
        "breakpoints bounded by |Δ|",
        prof.breakpoints() <= deltas.len(),
        format!("{} breakpoints for {} formulas", prof.breakpoints(), deltas.len()),
    ));
    o.csv = String::from("index,fingerprint,block\n");
    for (i, fp) in prof.fingerprints.iter().enumerate() {
        let block = prof.blocks.iter().position(|b| b.0 <= i && i <= b.1).unwrap();
        let bits: String = fp.iter().map(|&b| if b { '1' } else { '0' }).collect();
        o.csv.push_str(&format!("{i},{bits},{block}\n"));
    }
    Ok(o)
}

fn vc_profile(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let s = structure(cfg)?;
    let c = cfg.vc.as_ref().unwrap();
    let deltas: Vec<DeltaFormula> = c
        .deltas
        .iter()
        .map(|d| Ok(DeltaFormula { formula: formula(s.as_ref(), &d.formula)?, params: d.params.clone() }))
        .collect::<Result<_, RunError>>()?;
    let prof = vc_density_profile(s.as_ref(), &c.element_var, &deltas, &c.delta_id, c.recipe, &c.sizes, cfg.seed.unwrap_or(0))
        .map_err(|e| RunError::Config(e.to_string()))?;
    let mut o = Outcome::default();
    o.notes.push(format!(
        "slope {:.4}, intercept {:.4}, residuals {:?}, max count/size {:.4}",
        prof.slope, prof.intercept, prof.residuals, prof.max_ratio
    ));
    if let Some(expected) = &c.expect_counts {
        let got: Vec<usize> = prof.rows.iter().map(|r| r.count).collect();
        o.checks.push(Check::new("exact counts", &got == expected, format!("got {got:?}, expected {expected:?}")));
    }
    if let Some(target) = c.expect_slope {
        let tol = c.slope_tolerance.unwrap_or(0.15);
        o.checks.push(Check::new(
            "fitted slope",
            (prof.slope - target).abs() <= tol,
            format!("slope {:.4}, expected {target} ± {tol}", prof.slope),
        ));
    }
    o.csv = prof.csv();
    Ok(o)
}

fn qe(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let c = cfg.qe.as_ref().unwrap();
    let mut o = Outcome::default();
    if let Some(text) = &c.formula {
        let s = crate::structures::QLexGroup::new();
        let phi = formula(&s, text)?;
        let out = eliminate_all(&phi, c.rule).map_err(|e| RunError::Config(e.to_string()))?;
        let check = check_formula_against_oracle(&phi, &out, c.oracle_grid);
        o.notes.push(format!("eliminated: {out}"));
        o.checks.push(Check::new(
            "oracle agreement",
            check.disagreements.is_empty() == c.expect_agreement,
            format!("{} assignments, {} disagreements, {} undecided", check.assignments, check.disagreements.len(), check.undecided),
        ));
        o.counterexamples = check.disagreements.clone();
        o.csv = format!(
            "input,output,assignments,disagreements,undecided\n\"{phi}\",\"{out}\",{},{},{}\n",
            check.assignments,
            check.disagreements.len(),
            check.undecided
        );
        return Ok(o);
    }
    let seed = cfg.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks: Vec<ExistsBlock> = (0..c.blocks).map(|_| random_block(&mut rng)).collect();
    if c.include_regression {
        blocks.push(regression_block());
    }
    let rep = agreement_report(&blocks, c.rule, c.oracle_grid);
    let regression_flagged = c.include_regression && rep.flags_block(blocks.len() - 1);
    let detail = format!(
        "{} blocks, {} assignments, {} disagreements, {} errors",
        rep.blocks,
        rep.assignments_checked,
        rep.disagreements.len(),
        rep.errors.len()
    );
    if c.expect_agreement {
        o.checks.push(Check::new("oracle agreement", rep.agrees(), detail));
    } else {
        o.checks.push(Check::new("disagreement report non-empty", !rep.disagreements.is_empty(), detail));
        if c.include_regression {
            o.checks.push(Check::new(
                "regression block reported",
                regression_flagged,
                format!("boundary-column block {}", regression_block()),
            ));
        }
    }
    o.counterexamples = rep
        .disagreements
        .iter()
        .map(|d| format!("block {} {} at {}: oracle {}, rule {}", d.block_index, d.block, d.assignment, d.oracle, d.rule))
        .chain(rep.errors.iter().cloned())
        .collect();
    o.csv = format!(
        "rule,seed,blocks,assignments,disagreements,errors,regression_flagged\n{:?},{seed},{},{},{},{},{}\n{}",
        c.rule,
        rep.blocks,
        rep.assignments_checked,
        rep.disagreements.len(),
        rep.errors.len(),
        regression_flagged,
        rep.csv()
    );
    Ok(o)
}

fn hahn_verify(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let c = cfg.hahn.as_ref().unwrap();
    let seed = cfg.seed.unwrap();
    let mut o = Outcome::default();
    let mut csv = String::from("check,seed,samples,violations\n");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lemma_bad = 0;
    for _ in 0..c.samples {
        let (a, b) = (random_series(&mut rng), random_series(&mut rng));
        let rep = check_lemma51(&a, &b);
        if !rep.ok() {
            lemma_bad += 1;
            o.counterexamples.extend(rep.violations.into_iter().take(2));
        }
    }
    csv.push_str(&format!("lemma51,{seed},{},{lemma_bad}\n", c.samples));
    o.checks.push(Check::new("class arithmetic", lemma_bad == 0, format!("{lemma_bad} of {} pairs violate", c.samples)));

    let suite = axiom_suite(seed, c.samples);
    for r in &suite.results {
        csv.push_str(&format!("axiom {},{seed},{},{}\n", r.axiom, r.checked, r.violations.len()));
    }
    for name in &c.axioms {
        match suite.get(name) {
            Some(r) => {
                o.checks.push(Check::new(
                    format!("axiom {name}"),
                    r.passed(),
                    format!("{} instances, {} violations", r.checked, r.violations.len()),
                ));
                o.counterexamples.extend(r.violations.iter().filter(|v| !v.is_empty()).take(2).cloned());
            }
            None => return Err(RunError::Config(format!("unknown axiom `{name}`"))),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut rn_bad = 0;
    for _ in 0..c.samples {
        let a = random_series(&mut rng);
        let b = match rng.gen_range(0..3) {
            0 => random_series(&mut rng),
            1 => a.add(&random_series(&mut rng).abs()),
            _ => random_series(&mut rng).abs(),
        };
        let (x, y) = if rng.gen_bool(0.5) { (a.abs(), b.abs()) } else { (a, b) };
        if compute_rn(&x, &y) != rn_chain_oracle(&x, &y) {
            rn_bad += 1;
            if o.counterexamples.len() < 20 {
                o.counterexamples.push(format!("R_n disagreement on {x}; {y}"));
            }
        }
    }
    csv.push_str(&format!("rn_oracle,{seed},{},{rn_bad}\n", c.samples));
    o.checks.push(Check::new("alternation count", rn_bad == 0, format!("{rn_bad} of {} pairs disagree with the chain walk", c.samples)));
    o.csv = csv;
    Ok(o)
}

fn padic_verify(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let c = cfg.padic.as_ref().unwrap();
    let seed = cfg.seed.unwrap_or(0);
    let mut o = Outcome::default();
    let mut csv = String::from("check,p,param,seed,value,detail\n");
    if c.triples > 0 {
        let combos: Vec<(u64, u32)> = c.primes.iter().flat_map(|&p| c.ks.iter().map(move |&k| (p, k))).collect();
        let results: Vec<(u64, u32, usize, usize, Vec<String>)> = combos
            .par_iter()
            .map(|&(p, k)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 16) ^ u64::from(k));
                let (mut decided, mut held, mut bad) = (0, 0, Vec::new());
                for _ in 0..c.triples {
                    let (x, y, z) = random_triple(&mut rng, p, k, c.precision);
                    match check_prop61(&x, &y, &z, k) {
                        Ok(true) => {
                            decided += 1;
                            held += 1;
                        }
                        Ok(false) => {
                            decided += 1;
                            if bad.len() < 3 {
                                bad.push(format!("p={p} k={k}: x={x}, y={y}, z={z}"));
                            }
                        }
                        Err(_) => {}
                    }
                }
                (p, k, decided, held, bad)
            })
            .collect();
        for (p, k, decided, held, bad) in results {
            csv.push_str(&format!("prop61,{p},k={k},{seed},{held}/{decided},{}\n", c.triples - decided));
            o.checks.push(Check::new(
                format!("rv criterion p={p} k={k}"),
                held == decided && decided > 0,
                format!("{held} of {decided} decidable triples ({} undecidable)", c.triples - decided),
            ));
            o.counterexamples.extend(bad);
        }
    }
    if !c.ns.is_empty() {
        let combos: Vec<(u64, u32)> = c.primes.iter().flat_map(|&p| c.ns.iter().map(move |&n| (p, n))).collect();
        let results: Vec<(u64, u32, Result<crate::padic::CelllikeK, PadicError>)> =
            combos.par_iter().map(|&(p, n)| (p, n, find_celllike_k(p, n, c.bound))).collect();
        for (p, n, r) in results {
            match r {
                Ok(k) => {
                    // At k = 1 the level below compares valuations only, so a
                    // violation there is informative but not required.
                    let minimal = k.k == 1 || k.violations_at_k_minus_1 > 0;
                    let mut ok = k.violations_at_k == 0 && minimal && k.verified_exponent >= k.k + 2;
                    let mut detail = format!(
                        "derived_k={} (invariant mod {p}^{}, {} violations at k-1, Hensel modulus {p}^{})",
                        k.k, k.verified_exponent, k.violations_at_k_minus_1, k.hensel_modulus
                    );
                    if let Some(e) = c.expect_k.iter().find(|e| e[0] == p && e[1] == u64::from(n)) {
                        ok &= u64::from(k.k) == e[2];
                        detail.push_str(&format!(", expected {}", e[2]));
                    }
                    csv.push_str(&format!(
                        "celllike,{p},n={n},{seed},{},{}/{}/{}\n",
                        k.k, k.verified_exponent, k.violations_at_k, k.violations_at_k_minus_1
                    ));
                    o.notes.push(format!("p={p} n={n}: derived_k={}", k.k));
                    o.checks.push(Check::new(format!("least k p={p} n={n}"), ok, detail));
                }
                Err(PadicError::BoundExhausted { largest_k }) => {
                    return Err(RunError::Budget(format!("p={p} n={n}: no k up to {largest_k}")));
                }
                Err(e) => return Err(RunError::Config(e.to_string())),
            }
        }
    }
    o.csv = csv;
    Ok(o)
}
