use std::collections::BTreeSet;

use dpmin::hahn::{axiom_suite, compute_rn, hseries_p, rn_chain_oracle, HahnSeries};
use dpmin::padic::{check_prop61, find_celllike_k, random_triple, PadicApprox};
use dpmin::rational::{int, rat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Least k ≥ 1 such that every unit ≡ 1 mod p^k is an n-th power residue
/// modulo p^(2·v_p(n) + 3).
fn brute_k(p: u64, n: u32) -> u32 {
    let (mut v, mut m) = (0, n as u64);
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    let e = 2 * v + 3;
    let modulus = p.pow(e);
    let powers: BTreeSet<u64> =
        (1..modulus).filter(|x| x % p != 0).map(|x| (0..n).fold(1, |acc, _| acc * x % modulus)).collect();
    (1..=e)
        .find(|&k| (1..modulus).step_by(p.pow(k) as usize).all(|u| powers.contains(&u)))
        .unwrap()
}

#[test]
fn celllike_k_matches_residue_count() {
    for p in [2, 3, 5, 7] {
        for n in [1, 2, 3, 4, 6] {
            assert_eq!(find_celllike_k(p, n, 10).unwrap().k, brute_k(p, n), "p={p} n={n}");
        }
    }
}

#[test]
fn prop61_on_small_integers() {
    let a = |n: i64| PadicApprox::from_i64(3, n, 10);
    // 10 ≡ 1 (mod 9): x, y agree to level 2 relative to z = 0.
    assert!(check_prop61(&a(10), &a(1), &a(0), 2).unwrap());
    assert!(check_prop61(&a(4), &a(1), &a(0), 2).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in [2, 3, 5] {
        for k in 1..=3 {
            for _ in 0..200 {
                let (x, y, z) = random_triple(&mut rng, p, k, 12);
                if let Ok(ok) = check_prop61(&x, &y, &z, k) {
                    assert!(ok);
                }
            }
        }
    }
}

#[test]
fn rn_agrees_with_chain_oracle() {
    let t = |q: (i64, i64)| HahnSeries::t(rat(q.0, q.1));
    let pairs = [
        (t((1, 1)), t((1, 2))),
        (t((3, 1)), t((1, 3))),
        (t((5, 2)), t((5, 4))),
        (t((2, 1)), t((2, 1)).scale(&int(3))),
        (t((-1, 1)), t((-3, 1))),
    ];
    for (x, y) in pairs {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        assert_eq!(compute_rn(&lo, &hi), rn_chain_oracle(&lo, &hi), "{lo} {hi}");
    }
    assert_eq!(compute_rn(&t((1, 1)).neg(), &t((1, 1))), None);
}

#[test]
fn predicate_p_is_integer_valuation() {
    assert!(hseries_p(&HahnSeries::t(int(2))));
    assert!(!hseries_p(&HahnSeries::t(rat(1, 2))));
    assert!(hseries_p(&HahnSeries::zero()));
}

#[test]
fn axiom_suite_is_seeded() {
    let a = axiom_suite(5, 60);
    let b = axiom_suite(5, 60);
    assert_eq!(a.results, b.results);
    assert!(a.results.iter().all(|r| r.passed()));
}
