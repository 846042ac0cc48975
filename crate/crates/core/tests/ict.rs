use dpmin::formula::parse;
use dpmin::ict::{
    check_ict_certificate, check_inp_certificate, fuse_single_formula, refine_disjunct, search_ict, Budget,
    IctCertificate, IctError, InpCertificate, SearchMode, SearchSpec,
};
use dpmin::rational::{int, rat};
use dpmin::structures::{PairDlo, SimpleDlo, Structure};
use dpmin::Value;
use proptest::prelude::*;

fn r(a: i64) -> Value {
    Value::Rat(int(a))
}

fn p(a: (i64, i64), b: (i64, i64)) -> Value {
    Value::Pair(rat(a.0, a.1), rat(b.0, b.1))
}

fn strips(k: i64) -> Vec<Vec<Value>> {
    (0..k).map(|i| vec![r(i), r(i + 1)]).collect()
}

/// Unit strips in each coordinate with the centre of the (i, j) box as witness.
fn strip_certificate(s: &PairDlo, m: i64, n: i64) -> IctCertificate {
    IctCertificate {
        structure: "pair_dlo".into(),
        element_var: "x".into(),
        phi: parse("a < x.1 & x.1 < b", s.signature()).unwrap(),
        phi_params: vec!["a".into(), "b".into()],
        psi: parse("c < x.2 & x.2 < d", s.signature()).unwrap(),
        psi_params: vec!["c".into(), "d".into()],
        a_params: strips(m),
        b_params: strips(n),
        witnesses: (0..m).map(|i| (0..n).map(|j| p((2 * i + 1, 2), (2 * j + 1, 2))).collect()).collect(),
    }
}

fn spec(s: &dyn Structure, phi: &str, psi: &str, pool: Vec<Vec<Value>>, m: usize, n: usize) -> SearchSpec {
    SearchSpec {
        element_var: "x".into(),
        phi: parse(phi, s.signature()).unwrap(),
        phi_params: vec!["a".into(), "b".into()],
        psi: parse(psi, s.signature()).unwrap(),
        psi_params: vec!["c".into(), "d".into()],
        pool_a: pool.clone(),
        pool_b: pool,
        m,
        n,
        mode: SearchMode::Exhaustive,
        budget: Budget { max_pool: 40, ..Budget::default() },
    }
}

#[test]
fn pair_strips_found_and_verified() {
    let s = PairDlo::new();
    let out = search_ict(&s, &spec(&s, "a < x.1 & x.1 < b", "c < x.2 & x.2 < d", strips(5), 3, 3)).unwrap();
    let cert = out.certificate.expect("pattern present");
    assert_eq!((cert.rows(), cert.cols()), (3, 3));
    assert!(check_ict_certificate(&cert, &s).unwrap());
    // Selections are tried in lexicographic order, so the first strips win.
    assert_eq!(cert.a_params, strips(3));
}

#[test]
fn simple_dlo_has_no_two_by_two() {
    let s = SimpleDlo::new();
    let pool: Vec<Vec<Value>> = (0..4).flat_map(|a| (0..4).map(move |b| vec![r(a), r(b)])).collect();
    let out = search_ict(&s, &spec(&s, "a < x & x < b", "c < x & x < d", pool, 2, 2)).unwrap();
    assert!(out.certificate.is_none());
    assert!(out.exhaustive);
}

#[test]
fn search_is_deterministic_under_random_mode() {
    let s = PairDlo::new();
    let mut sp = spec(&s, "a < x.1 & x.1 < b", "c < x.2 & x.2 < d", strips(6), 3, 2);
    sp.mode = SearchMode::Random { seed: 9, tries: 200 };
    let a = search_ict(&s, &sp).unwrap();
    let b = search_ict(&s, &sp).unwrap();
    assert_eq!(a.certificate, b.certificate);
    assert_eq!(a.selections_tried, b.selections_tried);
}

#[test]
fn pool_budget_is_enforced() {
    let s = PairDlo::new();
    let mut sp = spec(&s, "a < x.1 & x.1 < b", "c < x.2 & x.2 < d", strips(6), 2, 2);
    sp.budget.max_pool = 3;
    assert!(matches!(search_ict(&s, &sp), Err(IctError::Budget(_))));
}

#[test]
fn certificate_round_trips_through_toml() {
    let s = PairDlo::new();
    let cert = strip_certificate(&s, 2, 3);
    let back = IctCertificate::from_toml(&cert.to_toml()).unwrap();
    assert_eq!(back, cert);
}

#[test]
fn refinement_picks_the_live_disjunct() {
    let s = PairDlo::new();
    let mut cert = strip_certificate(&s, 4, 4);
    cert.phi = parse("(a < x.1 & x.1 < b) | (b < x.1 & x.1 < a)", s.signature()).unwrap();
    let out = refine_disjunct(&cert, &s).unwrap();
    assert_eq!(out.disjunct, 1);
    assert_eq!(out.rows, vec![0, 1, 2, 3]);
    assert!(out.support[1].is_empty());
    assert!(check_ict_certificate(&out.certificate, &s).unwrap());
}

#[test]
fn alternating_rows_leave_no_disjunct() {
    let s = PairDlo::new();
    let cert = IctCertificate {
        structure: "pair_dlo".into(),
        element_var: "x".into(),
        phi: parse("x.1 < a | b < x.1", s.signature()).unwrap(),
        phi_params: vec!["a".into(), "b".into()],
        psi: parse("c < x.2 & x.2 < d", s.signature()).unwrap(),
        psi_params: vec!["c".into(), "d".into()],
        a_params: vec![vec![r(3), r(10)], vec![r(0), r(5)]],
        b_params: strips(2),
        witnesses: vec![
            vec![p((1, 1), (1, 2)), p((1, 1), (3, 2))],
            vec![p((7, 1), (1, 2)), p((7, 1), (3, 2))],
        ],
    };
    assert!(check_ict_certificate(&cert, &s).unwrap());
    assert!(matches!(refine_disjunct(&cert, &s), Err(IctError::NoDisjunct)));
}

#[test]
fn fusion_halves_the_pattern() {
    let s = PairDlo::new();
    let fused = fuse_single_formula(&strip_certificate(&s, 4, 4), &s).unwrap();
    assert_eq!((fused.rows(), fused.cols()), (2, 2));
    assert_eq!(fused.phi_params.len(), 4);
    assert!(check_ict_certificate(&fused, &s).unwrap());
}

#[test]
fn inp_strips() {
    let s = PairDlo::new();
    let cert = InpCertificate {
        structure: "pair_dlo".into(),
        element_var: "x".into(),
        phi: parse("a < x.1 & x.1 < b", s.signature()).unwrap(),
        phi_params: vec!["a".into(), "b".into()],
        psi: parse("c < x.2 & x.2 < d", s.signature()).unwrap(),
        psi_params: vec!["c".into(), "d".into()],
        k0: 2,
        k1: 2,
        a_params: strips(3),
        b_params: strips(3),
        witnesses: (0..3).map(|i| (0..3).map(|j| p((2 * i + 1, 2), (2 * j + 1, 2))).collect()).collect(),
    };
    assert!(check_inp_certificate(&cert, &s, 10_000).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn strip_certificates_verify(m in 1i64..4, n in 1i64..4) {
        let s = PairDlo::new();
        prop_assert!(check_ict_certificate(&strip_certificate(&s, m, n), &s).unwrap());
    }

    #[test]
    fn moved_witness_breaks_the_certificate(m in 2i64..4, n in 2i64..4, i in 0usize..2, j in 0usize..2) {
        let s = PairDlo::new();
        let mut cert = strip_certificate(&s, m, n);
        // Slide into the neighbouring column strip.
        cert.witnesses[i][j] = p(((2 * i as i64) + 1, 2), ((2 * j as i64) + 3, 2));
        prop_assert!(!check_ict_certificate(&cert, &s).unwrap());
    }
}
