//! One line per acceptance criterion, each at its stated tolerance. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use dpmin::formula::parse;
use dpmin::ict::{check_ict_certificate, fuse_single_formula, refine_disjunct, search_ict, IctCertificate, SearchSpec};
use dpmin::rational::int;
use dpmin::runner::{run, ExperimentConfig, RunReport};
use dpmin::structures::{by_name, PairDlo, SimpleDlo, Structure};
use dpmin::vc::{build_elements, count_delta_types, ict_linkage_count, DeltaFormula, Recipe};
use dpmin::Value;

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/acceptance").join(name);
    ExperimentConfig::from_toml(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn timed(name: &str) -> (RunReport, Duration) {
    let start = Instant::now();
    let rep = run(&config(name), None).unwrap();
    (rep, start.elapsed())
}

fn line(id: &str, what: &str, passed: bool, detail: &str) {
    println!("ACCEPTANCE {id} {what}: {} | {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {id} failed: {detail}");
}

fn failing_checks(rep: &RunReport) -> String {
    let bad: Vec<String> = rep.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    if bad.is_empty() {
        format!("{} checks passed", rep.checks.len())
    } else {
        bad.join("; ")
    }
}

/// Certificate found by the PairDLO search config, rebuilt through the library.
fn pair_certificate() -> IctCertificate {
    let cfg = config("ict_pair_present.toml");
    let c = cfg.ict.as_ref().unwrap();
    let s = by_name(cfg.structure.as_deref().unwrap()).unwrap();
    let vals = |rows: &[Vec<String>]| -> Vec<Vec<Value>> {
        rows.iter().map(|r| r.iter().map(|t| s.parse_value(t).unwrap()).collect()).collect()
    };
    let spec = SearchSpec {
        element_var: c.element_var.clone(),
        phi: parse(&c.phi, s.signature()).unwrap(),
        phi_params: c.phi_params.clone(),
        psi: parse(&c.psi, s.signature()).unwrap(),
        psi_params: c.psi_params.clone(),
        pool_a: vals(&c.pool_a),
        pool_b: vals(&c.pool_b),
        m: c.m,
        n: c.n,
        mode: dpmin::ict::SearchMode::Exhaustive,
        budget: c.budget.clone(),
    };
    search_ict(s.as_ref(), &spec).unwrap().certificate.unwrap()
}

#[test]
fn criterion_1_rv_criterion() {
    let (rep, t) = timed("prop61.toml");
    let ok = rep.passed && t < Duration::from_secs(5);
    line("1", "RV criterion on 10^4 triples per (p, k)", ok, &format!("{} in {:.2?} (limit 5 s)", failing_checks(&rep), t));
}

/// Least k ≥ 1 with 1 + p^k·Z_p inside the n-th powers, read off from the
/// n-th powers of units modulo p^(h+2).
fn residue_oracle_k(p: u64, n: u32) -> u32 {
    let mut v = 0;
    let mut m = n;
    while m % p as u32 == 0 {
        m /= p as u32;
        v += 1;
    }
    let e = 2 * v + 1 + 2;
    let modulus = p.pow(e);
    let powers: BTreeSet<u64> = (1..modulus)
        .filter(|x| x % p != 0)
        .map(|x| (0..n).fold(1u64, |acc, _| acc * x % modulus))
        .collect();
    (1..=e).find(|&k| (1..modulus).filter(|u| u % p.pow(k) == 1 % p.pow(k)).all(|u| powers.contains(&u))).unwrap()
}

#[test]
fn criterion_2_least_celllike_k() {
    let (rep, t) = timed("celllike.toml");
    let k32 = dpmin::padic::find_celllike_k(3, 2, 8).unwrap().k;
    let k22 = dpmin::padic::find_celllike_k(2, 2, 8).unwrap().k;
    let (o32, o22) = (residue_oracle_k(3, 2), residue_oracle_k(2, 2));
    let ok = rep.passed && t < Duration::from_secs(30) && k32 == o32 && k22 == o22 && o32 == 1 && o22 == 3;
    line(
        "2",
        "least cell-like k for (p, n) in {2,3,5} x {2,3,4}",
        ok,
        &format!(
            "{}; k(3,2)={k32} oracle {o32}, k(2,2)={k22} oracle {o22}; at k=1 the level below compares valuations only; {:.2?} (limit 30 s)",
            failing_checks(&rep),
            t
        ),
    );
}

#[test]
fn criterion_3_ict_search() {
    let (absent, t1) = timed("ict_simple_absent.toml");
    let (present, t2) = timed("ict_pair_present.toml");
    let cert = pair_certificate();
    let verified = check_ict_certificate(&cert, &PairDlo::new()).unwrap();
    let ok = absent.passed && present.passed && verified && t1 + t2 < Duration::from_secs(10);
    line(
        "3",
        "SimpleDLO 2x2 absent, PairDLO 4x4 present",
        ok,
        &format!("{}; {}; certificate verified = {verified}; {:.2?} (limit 10 s)", failing_checks(&absent), failing_checks(&present), t1 + t2),
    );
}

#[test]
fn criterion_4_fusion_and_refinement() {
    let s = PairDlo::new();
    let cert = pair_certificate();
    let fused = fuse_single_formula(&cert, &s).unwrap();
    let fused_ok = fused.rows() == 2 && fused.cols() == 2 && check_ict_certificate(&fused, &s).unwrap();

    let sig = s.signature();
    let two = IctCertificate {
        phi: parse("(a < x.1 & x.1 < b) | (b < x.1 & x.1 < a)", sig).unwrap(),
        ..cert.clone()
    };
    let refined = refine_disjunct(&two, &s).unwrap();
    let refine_ok = refined.disjunct == 1 && refined.rows == vec![0, 1, 2, 3];
    line(
        "4",
        "single-formula fusion and disjunct refinement",
        fused_ok && refine_ok,
        &format!(
            "fused {}x{} valid = {fused_ok}; refinement chose disjunct {} keeping rows {:?}",
            fused.rows(),
            fused.cols(),
            refined.disjunct,
            refined.rows
        ),
    );
}

#[test]
fn criterion_5_exact_counts_and_linkage() {
    let simple = SimpleDlo::new();
    let d1 = [DeltaFormula::new(parse("x < y", simple.signature()).unwrap(), &["y"])];
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [4usize, 8, 16, 32] {
        let a: Vec<Value> = (1..=n as i64).map(|i| Value::Rat(int(i))).collect();
        let c = count_delta_types(&simple, "x", &d1, &a).unwrap().count();
        ok &= c == n + 1;
        detail.push(format!("simple N={n}: {c}"));
    }
    let pair = PairDlo::new();
    let d2 = [
        DeltaFormula::new(parse("x.1 < y.1", pair.signature()).unwrap(), &["y"]),
        DeltaFormula::new(parse("x.2 < y.2", pair.signature()).unwrap(), &["y"]),
    ];
    for n in [4usize, 8, 16] {
        let a = build_elements(&pair, Recipe::TwoFamily, 2 * n, 0);
        let c = count_delta_types(&pair, "x", &d2, &a).unwrap().count();
        ok &= c == (n + 1) * (n + 1) && 4 * c >= a.len() * a.len();
        detail.push(format!("pair N={n}: {c}"));
    }
    let cert = pair_certificate();
    let link = ict_linkage_count(&cert, &pair).unwrap();
    ok &= link >= cert.rows() * cert.cols();
    detail.push(format!("linkage {link} >= {}", cert.rows() * cert.cols()));
    line("5a", "exact type counts and ICT linkage", ok, &detail.join(", "));
}

#[test]
fn criterion_5_simple_slope() {
    let (rep, _) = timed("vc_simple.toml");
    line("5b", "SimpleDLO fitted slope 1 ± 0.15", rep.passed, &failing_checks(&rep));
}

#[test]
fn criterion_5_pair_slope() {
    // Counts (N/2 + 1)^2 over sizes 4..32 fit a slope of about 1.67; the
    // curve only approaches 2 asymptotically.
    let (rep, _) = timed("vc_pair.toml");
    line("5c", "PairDLO fitted slope 2 ± 0.15", rep.passed, &failing_checks(&rep));
}

#[test]
fn criterion_6_hahn_series() {
    let (rep, t) = timed("hahn.toml");
    line("6", "class arithmetic, axioms, R_n oracle on 500 samples", rep.passed, &format!("{} in {t:.2?}", failing_checks(&rep)));
}

#[test]
fn criterion_7_quantifier_elimination() {
    let (validated, t1) = timed("qe_validated.toml");
    let (paper, t2) = timed("qe_paper.toml");
    let ok = validated.passed && paper.passed && t1 + t2 < Duration::from_secs(60);
    line(
        "7",
        "validated rule agrees, paper rule reports the regression",
        ok,
        &format!("{}; {}; {:.2?} (limit 60 s)", failing_checks(&validated), failing_checks(&paper), t1 + t2),
    );
}

#[test]
fn criterion_8_determinism() {
    let names = [
        "prop61.toml",
        "celllike.toml",
        "ict_simple_absent.toml",
        "ict_pair_present.toml",
        "vc_simple.toml",
        "vc_pair.toml",
        "hahn.toml",
        "qe_validated.toml",
        "qe_paper.toml",
    ];
    let mut differing = Vec::new();
    for n in names {
        let cfg = config(n);
        let a = run(&cfg, Some(1)).unwrap();
        let b = run(&cfg, Some(4)).unwrap();
        if a.csv != b.csv {
            differing.push(n);
        }
    }
    line(
        "8",
        "byte-identical CSV on re-run (1 and 4 workers)",
        differing.is_empty(),
        &format!("{} configs re-run, differing: {differing:?}", names.len()),
    );
}
