use dpmin::formula::{evaluate, parse, parse_term, Assignment, Formula, Term};
use dpmin::qe::{
    agreement_report, eliminate_all, eliminate_exists, normalize_term, oracle_points, paper_rule, random_block,
    regression_block, same_column, validated_rule, ExistsBlock, NormalTerm, Rule,
};
use dpmin::rational::int;
use dpmin::structures::{LexPoint, QLexGroup, Structure};
use dpmin::Value;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(a: i64, b: i64) -> Option<NormalTerm> {
    Some(NormalTerm::constant(LexPoint::new(int(a), int(b))))
}

fn closed(f: &Formula) -> bool {
    evaluate(&QLexGroup::new(), f, &Assignment::new()).unwrap()
}

#[test]
fn wide_box() {
    let b = ExistsBlock::new("x", pt(0, 0), pt(1, 1), pt(-2, 0), pt(2, 0)).unwrap();
    assert!(closed(&b.to_formula()));
    assert!(closed(&validated_rule(&b).unwrap()));
}

#[test]
fn empty_x_range() {
    let b = ExistsBlock::new("x", pt(1, 0), pt(0, 0), pt(-2, 0), pt(2, 0)).unwrap();
    assert!(!closed(&validated_rule(&b).unwrap()));
    assert!(!closed(&paper_rule(&b)));
}

#[test]
fn boundary_column_case() {
    let b = regression_block();
    assert!(closed(&b.to_formula()));
    assert!(!closed(&paper_rule(&b)));
    assert!(closed(&validated_rule(&b).unwrap()));
}

#[test]
fn paper_rule_errs_in_both_directions() {
    // x ranges over columns 0 (upper half) to 1 (lower half), so f(x) only
    // reaches column −1 below height 0; the target lies above it.
    let b = ExistsBlock::new("x", pt(0, 0), pt(1, 0), pt(-1, 0), pt(-1, 5)).unwrap();
    assert!(!closed(&b.to_formula()));
    assert!(closed(&paper_rule(&b)));
    assert!(!closed(&validated_rule(&b).unwrap()));
    // Everything inside column 0: x = (0, 7) works.
    let b = ExistsBlock::new("x", pt(0, 0), pt(0, 10), pt(0, 5), pt(0, 20)).unwrap();
    assert!(closed(&b.to_formula()));
    assert!(!closed(&paper_rule(&b)));
    assert!(closed(&validated_rule(&b).unwrap()));
}

#[test]
fn validated_rule_matches_oracle_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut blocks: Vec<ExistsBlock> = (0..120).map(|_| random_block(&mut rng)).collect();
    blocks.push(regression_block());
    let rep = agreement_report(&blocks, Rule::Validated, 6);
    assert!(rep.agrees(), "{:?}", rep.disagreements.first());
    let paper = agreement_report(&blocks, Rule::Paper, 6);
    assert!(paper.flags_block(blocks.len() - 1));
}

#[test]
fn same_column_on_a_grid() {
    let s = QLexGroup::new();
    let phi = same_column(&Term::var("a"), &Term::var("b"));
    let pts: Vec<LexPoint> = (0..20).map(|k| LexPoint::new(int(k / 5 - 2), int(k % 5 - 2))).collect();
    for p in &pts {
        for q in &pts {
            let env: Assignment =
                [("a".to_string(), p.to_value()), ("b".to_string(), q.to_value())].into_iter().collect();
            assert_eq!(evaluate(&s, &phi, &env).unwrap(), p.first == q.first);
        }
    }
}

#[test]
fn normalization_preserves_values() {
    let s = QLexGroup::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let texts = ["f(x + (2)*y)", "f(f(x)) + (-1/2)*y", "(3)*f(x + (1,2)) + f(y)", "f((1/2)*(x + f(y))) + (0,1)"];
    for t in texts {
        let term = parse_term(t, s.signature()).unwrap();
        let n = normalize_term(&term).unwrap();
        for _ in 0..250 {
            let env: Assignment = ["x", "y"].iter().map(|v| (v.to_string(), s.sample(&mut rng))).collect();
            let direct = s.eval_term(&term, &env).unwrap();
            assert_eq!(Value::Pair(n.eval(&env).unwrap().first, n.eval(&env).unwrap().second), direct);
            let _ = rng.gen::<u8>();
        }
    }
}

#[test]
fn eliminate_all_examples() {
    let s = QLexGroup::new();
    let sig = s.signature();
    let a = eliminate_all(&parse("E x. ((0,0) < x & x < (0,1))", sig).unwrap(), Rule::Validated).unwrap();
    assert!(a.is_true());
    let b = eliminate_all(&parse("E x. (y < x & x < y)", sig).unwrap(), Rule::Validated).unwrap();
    assert!(b.is_false());
    let qf = parse("y < f(z) | z = (1,2)", sig).unwrap();
    assert_eq!(eliminate_all(&qf, Rule::Validated).unwrap(), qf);
}

#[test]
fn nested_and_universal() {
    let s = QLexGroup::new();
    let sig = s.signature();
    let texts = [
        "A x. E w. (x < w & f(w) < f(x))",
        "E x. (y < x & !(f(x) = z) & f(x) < (0,1))",
        "A x. (!(y < x) | E w. (y < w & w < x & f(w) = f(y)))",
        "E x. ((2)*x + f(y) = z)",
        "E x. (x + f(x) = y)",
    ];
    for t in texts {
        let phi = parse(t, sig).unwrap();
        let out = eliminate_all(&phi, Rule::Validated).unwrap();
        assert!(out.is_quantifier_free());
        let vars: Vec<String> = phi.free_vars().into_iter().collect();
        for env in dpmin::qe::assignments(&vars, &oracle_points(9)) {
            // The original may nest quantifiers over arithmetic, which the
            // grid evaluator rejects; compare only where it answers.
            if let Ok(truth) = evaluate(&s, &phi, &env) {
                assert_eq!(evaluate(&s, &out, &env).unwrap(), truth, "{t} at {env:?}");
            }
        }
    }
    let _ = eliminate_exists(&regression_block(), Rule::Paper).unwrap();
}

#[test]
fn printed_formulas_parse_back() {
    let s = dpmin::structures::QLexGroup::new();
    for text in [
        "E x. ((0,0) < x & x < (1,0) & (0,0) < f(x) & f(x) < (1,0))",
        "A y. (E x. (y < x | x = y)) & !(y < 0)",
        "E x. x < y | x = z",
    ] {
        let f = dpmin::formula::parse(text, dpmin::Structure::signature(&s)).unwrap();
        let again = dpmin::formula::parse(&f.to_string(), dpmin::Structure::signature(&s)).unwrap();
        assert_eq!(again, f, "{f}");
    }
}
