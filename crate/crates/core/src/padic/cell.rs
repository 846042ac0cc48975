use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{vp, PadicApprox, PadicError};
use crate::formula::ValBound;

/// `Ann(c, γ, δ) ∩ Pow_{n,λ}(c)`. `gamma = None` is +∞ and `delta = None`
/// is −∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSpec {
    pub n: u32,
    pub lambda: u64,
    pub center: PadicApprox,
    pub gamma: ValBound,
    pub delta: ValBound,
}

impl CellSpec {
    pub fn new(n: u32, lambda: u64, center: PadicApprox, gamma: ValBound, delta: ValBound) -> CellSpec {
        assert!(n >= 1, "power must be positive");
        if let (Some(g), Some(d)) = (gamma, delta) {
            assert!(g >= d, "annulus bounds out of order");
        }
        CellSpec { n, lambda, center, gamma, delta }
    }
}

/// h = 2·v_p(n) + 1: a unit is an n-th power iff it is one modulo p^h.
pub fn hensel_modulus(p: u64, n: u32) -> u32 {
    2 * vp(p, &BigInt::from(n)) + 1
}

fn modpow(b: u64, e: u32, m: u64) -> u64 {
    let mut r: u128 = 1 % m as u128;
    let mut b = b as u128 % m as u128;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    r as u64
}

/// Unit residues mod p^h and the subgroup of n-th powers among them.
#[derive(Clone, Debug)]
pub struct PowerResidues {
    pub p: u64,
    pub n: u32,
    pub h: u32,
    pub modulus: u64,
    pub powers: BTreeSet<u64>,
}

impl PowerResidues {
    pub fn new(p: u64, n: u32) -> PowerResidues {
        let h = hensel_modulus(p, n);
        let modulus = p.pow(h);
        let powers = (1..modulus).filter(|w| w % p != 0).map(|w| modpow(w, n, modulus)).collect();
        PowerResidues { p, n, h, modulus, powers }
    }

    pub fn unit_count(&self) -> u64 {
        self.modulus - self.modulus / self.p
    }

    /// Number of cosets of P_n in K^×: n valuation classes times the unit
    /// cosets.
    pub fn index(&self) -> u64 {
        self.n as u64 * (self.unit_count() / self.powers.len() as u64)
    }

    fn inverse(&self, u: u64) -> u64 {
        let e = (u as i128).extended_gcd(&(self.modulus as i128));
        e.x.mod_floor(&(self.modulus as i128)) as u64
    }

    /// Canonical label of the coset of p^v·u.
    pub fn coset_of(&self, v: i64, unit: u64) -> (u32, u64) {
        let u = unit % self.modulus;
        let least = self.powers.iter().map(|h| (h * u) % self.modulus).min().expect("nonempty");
        (v.rem_euclid(self.n as i64) as u32, least)
    }

    /// p^v·u ∈ λ·P_n for λ ≠ 0.
    pub fn member(&self, v: i64, unit: u64, lambda: u64) -> bool {
        debug_assert!(lambda != 0);
        let lv = vp(self.p, &BigInt::from(lambda)) as i64;
        let lu = (lambda / self.p.pow(lv as u32)) % self.modulus;
        if (v - lv).rem_euclid(self.n as i64) != 0 {
            return false;
        }
        let ratio = (unit % self.modulus) * self.inverse(lu) % self.modulus;
        self.powers.contains(&ratio)
    }

    /// Least natural numbers hitting each coset of P_n, in increasing order.
    pub fn coset_representatives(&self) -> Vec<u64> {
        let target = self.index() as usize;
        let mut seen = BTreeSet::new();
        let mut reps = Vec::new();
        let mut lambda = 1u64;
        while seen.len() < target {
            let v = vp(self.p, &BigInt::from(lambda));
            let u = lambda / self.p.pow(v);
            if seen.insert(self.coset_of(v as i64, u)) {
                reps.push(lambda);
            }
            lambda += 1;
        }
        reps
    }
}

/// Counts the distinct cosets λP_n by brute force over residues mod p^m for
/// m ≥ h, independently of the subgroup bookkeeping above.
pub fn brute_force_coset_count(p: u64, n: u32, m: u32) -> u64 {
    let modulus = p.pow(m);
    let units: Vec<u64> = (1..modulus).filter(|w| w % p != 0).collect();
    let powers: BTreeSet<u64> = units.iter().map(|&w| modpow(w, n, modulus)).collect();
    let mut classes: BTreeSet<Vec<u64>> = BTreeSet::new();
    for &u in &units {
        let mut c: Vec<u64> = powers.iter().map(|h| h * u % modulus).collect();
        c.sort_unstable();
        classes.insert(c);
    }
    n as u64 * classes.len() as u64
}

/// γ ≥ v(d) ≥ δ, deciding from the stored digits or reporting that it cannot.
pub fn annulus_holds(d: &PadicApprox, upper: ValBound, lower: ValBound) -> Result<bool, PadicError> {
    match d.valuation() {
        Some(v) => Ok(upper.is_none_or(|g| v <= g) && lower.is_none_or(|l| v >= l)),
        None => {
            let a = d.absolute_precision();
            match upper {
                Some(g) if a > g => Ok(false),
                Some(_) => Err(PadicError::Indistinguishable(format!("v(x - c) >= {a} against upper bound"))),
                None if lower.is_none_or(|l| a >= l) => Ok(true),
                None => Err(PadicError::Indistinguishable(format!("v(x - c) >= {a} against lower bound"))),
            }
        }
    }
}

/// d ∈ λ·P_n; λ = 0 reads as d = 0 at the stored precision.
pub fn pow_holds(d: &PadicApprox, n: u32, lambda: u64) -> Result<bool, PadicError> {
    if lambda == 0 {
        return Ok(d.is_zero());
    }
    let Some(v) = d.valuation() else {
        return Err(PadicError::Indistinguishable("x - c in a power coset".into()));
    };
    let table = PowerResidues::new(d.prime(), n);
    if d.precision() < table.h {
        return Err(PadicError::InsufficientPrecision {
            needed: table.h as i64,
            available: d.precision() as i64,
        });
    }
    let u = d.unit().mod_floor(&BigInt::from(table.modulus)).to_u64().expect("fits");
    Ok(table.member(v, u, lambda))
}

pub fn in_cell(x: &PadicApprox, cell: &CellSpec) -> Result<bool, PadicError> {
    let d = x.sub(&cell.center);
    if !annulus_holds(&d, cell.gamma, cell.delta)? {
        return Ok(false);
    }
    pow_holds(&d, cell.n, cell.lambda)
}

/// CSV-friendly coset summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetSummary {
    pub p: u64,
    pub n: u32,
    pub hensel_modulus: u32,
    pub representatives: Vec<u64>,
    pub brute_force_count: u64,
}

pub fn coset_summary(p: u64, n: u32) -> CosetSummary {
    let t = PowerResidues::new(p, n);
    CosetSummary {
        p,
        n,
        hensel_modulus: t.h,
        representatives: t.coset_representatives(),
        brute_force_count: brute_force_coset_count(p, n, t.h + 2),
    }
}
