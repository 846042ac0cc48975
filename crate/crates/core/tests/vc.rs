use dpmin::formula::parse;
use dpmin::rational::int;
use dpmin::structures::{PairDlo, QLexGroup, SimpleDlo, Structure};
use dpmin::vc::{
    all_instances, build_elements, count_delta_types, count_instances, fit_loglog, vc_density_profile, DeltaFormula,
    Recipe, VcError,
};
use dpmin::Value;
use proptest::prelude::*;

fn line(n: i64) -> Vec<Value> {
    (1..=n).map(|i| Value::Rat(int(i))).collect()
}

fn cut(s: &dyn Structure) -> Vec<DeltaFormula> {
    vec![DeltaFormula::new(parse("x < y", s.signature()).unwrap(), &["y"])]
}

#[test]
fn cuts_on_a_line() {
    let s = SimpleDlo::new();
    for n in [1, 2, 5, 12] {
        assert_eq!(count_delta_types(&s, "x", &cut(&s), &line(n)).unwrap().count(), n as usize + 1);
    }
}

#[test]
fn equality_splits_points_from_gaps() {
    let s = SimpleDlo::new();
    let d = vec![
        DeltaFormula::new(parse("x < y", s.signature()).unwrap(), &["y"]),
        DeltaFormula::new(parse("x = y", s.signature()).unwrap(), &["y"]),
    ];
    assert_eq!(count_delta_types(&s, "x", &d, &line(6)).unwrap().count(), 13);
}

#[test]
fn constant_delta_has_one_type() {
    let s = SimpleDlo::new();
    let d = vec![DeltaFormula::new(parse("y = y", s.signature()).unwrap(), &["y"])];
    assert_eq!(count_delta_types(&s, "x", &d, &line(7)).unwrap().count(), 1);
    assert_eq!(count_delta_types(&s, "x", &[], &line(7)).unwrap().count(), 1);
}

#[test]
fn two_orders_on_two_families() {
    let s = PairDlo::new();
    let d = vec![
        DeltaFormula::new(parse("x.1 < y.1", s.signature()).unwrap(), &["y"]),
        DeltaFormula::new(parse("x.2 < y.2", s.signature()).unwrap(), &["y"]),
    ];
    for h in [2usize, 3, 6] {
        let a = build_elements(&s, Recipe::TwoFamily, 2 * h, 0);
        assert_eq!(count_delta_types(&s, "x", &d, &a).unwrap().count(), (h + 1) * (h + 1));
    }
}

#[test]
fn binary_formula_uses_pairs_of_parameters() {
    let s = SimpleDlo::new();
    let d = vec![DeltaFormula::new(parse("y < x & x < z", s.signature()).unwrap(), &["y", "z"])];
    assert_eq!(all_instances(&d, &line(3)).len(), 9);
    // Between-ness over 1..3 still cuts the line at the three points.
    assert_eq!(count_delta_types(&s, "x", &d, &line(3)).unwrap().count(), 4);
}

#[test]
fn lex_group_counts() {
    let s = QLexGroup::new();
    let d = vec![DeltaFormula::new(parse("f(x) < y", s.signature()).unwrap(), &["y"])];
    let a = build_elements(&s, Recipe::UniformGrid, 4, 0);
    assert_eq!(count_delta_types(&s, "x", &d, &a).unwrap().count(), 5);
}

#[test]
fn profile_rejects_bad_sizes() {
    let s = SimpleDlo::new();
    assert!(matches!(vc_density_profile(&s, "x", &cut(&s), "cut", Recipe::UniformGrid, &[4], 0), Err(VcError::Sizes)));
    assert!(matches!(
        vc_density_profile(&s, "x", &cut(&s), "cut", Recipe::UniformGrid, &[8, 4], 0),
        Err(VcError::Sizes)
    ));
}

#[test]
fn fit_on_exact_power_law() {
    let (slope, intercept, res) = fit_loglog(&[(2, 12), (4, 48), (8, 192)]);
    assert!((slope - 2.0).abs() < 1e-12);
    assert!((intercept - 3f64.ln()).abs() < 1e-12);
    assert!(res.iter().all(|r| r.abs() < 1e-12));
}

#[test]
fn csv_layout() {
    let s = SimpleDlo::new();
    let prof = vc_density_profile(&s, "x", &cut(&s), "cut", Recipe::UniformGrid, &[2, 4], 0).unwrap();
    let csv = prof.csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("structure,delta_id,size,exact_count,fitted_slope"));
    assert!(lines.next().unwrap().starts_with("simple_dlo,cut,2,3,"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn adding_elements_never_lowers_the_count(n in 1i64..10, extra in 1i64..5) {
        let s = SimpleDlo::new();
        let small = count_delta_types(&s, "x", &cut(&s), &line(n)).unwrap().count();
        let big = count_delta_types(&s, "x", &cut(&s), &line(n + extra)).unwrap().count();
        prop_assert!(big >= small);
    }

    #[test]
    fn refining_the_grid_keeps_the_count(n in 1i64..6, seed in 0u64..50) {
        let s = PairDlo::new();
        let d = vec![
            DeltaFormula::new(parse("x.1 < y.1", s.signature()).unwrap(), &["y"]),
            DeltaFormula::new(parse("x.2 = y.2", s.signature()).unwrap(), &["y"]),
        ];
        let a = build_elements(&s, Recipe::Random, n as usize, seed);
        let base = count_instances(&s, "x", &d, all_instances(&d, &a), 0).unwrap();
        let refined = count_instances(&s, "x", &d, all_instances(&d, &a), 1).unwrap();
        prop_assert_eq!(base.count(), refined.count());
        prop_assert!(refined.grid_size >= base.grid_size);
    }
}
