use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cell::PowerResidues;
use super::{pow, random_padic, PadicApprox, PadicError, PadicStructure};
use crate::formula::{evaluate, Assignment, Formula};
use crate::value::Value;

/// Result of the least-k search for one (p, n).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CelllikeK {
    pub p: u64,
    pub n: u32,
    pub k: u32,
    pub hensel_modulus: u32,
    /// Invariance at `k` was checked over all residues mod p^verified_exponent.
    pub verified_exponent: u32,
    pub violations_at_k: u64,
    /// Violations one level down; level 0 compares valuations only.
    pub violations_at_k_minus_1: u64,
}

/// Pairs (p^v·u, p^v·u') with u ≡ u' mod p^level, v in 0..=n, u and u'
/// units mod p^m, that some coset λP_n separates.
pub fn count_violations(table: &PowerResidues, level: u32, m: u32) -> u64 {
    assert!(m >= table.h, "modulus below the Hensel bound");
    let p = table.p;
    let modulus = p.pow(m);
    let step = p.pow(level);
    let reps = table.coset_representatives();
    let units: Vec<u64> = (1..modulus).filter(|u| u % p != 0).collect();
    units
        .par_iter()
        .map(|&u| {
            let mut bad = 0u64;
            for v in 0..=table.n as i64 {
                let mut u2 = u % step;
                while u2 < modulus {
                    if u2 % p != 0
                        && u2 != u
                        && reps.iter().any(|&l| table.member(v, u, l) != table.member(v, u2, l))
                    {
                        bad += 1;
                    }
                    u2 += step;
                }
            }
            bad
        })
        .sum()
}

/// Least k ≥ 1 such that π_k-equality of x − c preserves membership in
/// every coset λP_n, verified exhaustively over residues mod p^max(k+2, h).
pub fn find_celllike_k(p: u64, n: u32, bound: u32) -> Result<CelllikeK, PadicError> {
    if !super::is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    let table = PowerResidues::new(p, n);
    for k in 1..=bound {
        let m = (k + 2).max(table.h);
        let at_k = count_violations(&table, k, m);
        if at_k == 0 {
            return Ok(CelllikeK {
                p,
                n,
                k,
                hensel_modulus: table.h,
                verified_exponent: m,
                violations_at_k: 0,
                violations_at_k_minus_1: count_violations(&table, k - 1, m),
            });
        }
    }
    Err(PadicError::BoundExhausted { largest_k: bound })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CelllikeReport {
    pub k: u32,
    pub samples: usize,
    /// Samples dropped because a side could not be decided at the precision.
    pub skipped: usize,
    pub violations: usize,
    pub examples: Vec<String>,
}

/// Samples (x, y0, ȳ, x', y0') with π_k(x − y0) = π_k(x' − y0') and reports
/// instances where φ(x; y0, ȳ) holds but φ(x'; y0', ȳ) does not. The same ȳ
/// is used on both sides.
pub fn check_celllike(
    s: &PadicStructure,
    phi: &Formula,
    x_var: &str,
    center: &str,
    k: u32,
    samples: usize,
    seed: u64,
) -> CelllikeReport {
    let p = s.prime();
    let prec = s.precision();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let others: Vec<String> =
        phi.free_vars().into_iter().filter(|v| v != x_var && v != center).collect();
    let mut rep = CelllikeReport { k, samples, ..Default::default() };
    for _ in 0..samples {
        let y0 = random_padic(&mut rng, p, -1..=2, prec);
        let offset = if rng.gen_ratio(1, 4) {
            PadicApprox::from_i64(p, rng.gen_range(1..=3), prec)
        } else {
            random_padic(&mut rng, p, 0..=4, prec)
        };
        let x = y0.add(&offset);
        let y0b = random_padic(&mut rng, p, -1..=2, prec);
        let r = PadicApprox::from_integer(p, &rng.gen_range(0..1_000_000u64).into(), prec);
        let one = PadicApprox::from_i64(p, 1, prec);
        let factor = one.add(&r.mul(&PadicApprox::from_integer(p, &pow(p, k), prec)));
        let xb = y0b.add(&x.sub(&y0).mul(&factor));
        let mut a = Assignment::new();
        for o in &others {
            a.insert(o.clone(), Value::Padic(random_padic(&mut rng, p, 0..=2, prec)));
        }
        let mut left = a.clone();
        left.insert(x_var.to_string(), Value::Padic(x.clone()));
        left.insert(center.to_string(), Value::Padic(y0.clone()));
        let mut right = a;
        right.insert(x_var.to_string(), Value::Padic(xb.clone()));
        right.insert(center.to_string(), Value::Padic(y0b.clone()));
        match (evaluate(s, phi, &left), evaluate(s, phi, &right)) {
            (Ok(true), Ok(false)) => {
                rep.violations += 1;
                if rep.examples.len() < 5 {
                    rep.examples.push(format!("x={x}, y0={y0}; x'={xb}, y0'={y0b}"));
                }
            }
            (Ok(_), Ok(_)) => {}
            _ => rep.skipped += 1,
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let k32 = find_celllike_k(3, 2, 6).unwrap();
        assert_eq!(k32.k, 1);
        assert!(k32.violations_at_k_minus_1 > 0);
        let k22 = find_celllike_k(2, 2, 6).unwrap();
        assert_eq!(k22.k, 3);
        assert!(k22.violations_at_k_minus_1 > 0);
        assert_eq!(find_celllike_k(7, 1, 3).unwrap().k, 1);
        assert!(matches!(find_celllike_k(4, 2, 3), Err(PadicError::NotPrime(4))));
    }

    #[test]
    fn bound_exhaustion() {
        assert_eq!(find_celllike_k(2, 2, 2), Err(PadicError::BoundExhausted { largest_k: 2 }));
    }
}
