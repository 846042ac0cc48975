use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;

use super::{pow, PadicApprox, PadicError};

/// Image of a nonzero element in K^× / (1 + 𝔪^k).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RvClass {
    pub valuation: i64,
    pub residue: BigInt,
    pub level: u32,
}

/// π_k(x): a class, or the adjoined point ∞ for x = 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rv {
    Infinity,
    Class(RvClass),
}

impl fmt::Display for Rv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rv::Infinity => write!(f, "inf"),
            Rv::Class(c) => write!(f, "({}, {} mod p^{})", c.valuation, c.residue, c.level),
        }
    }
}

pub fn pi_k(x: &PadicApprox, k: u32) -> Result<Rv, PadicError> {
    let Some(v) = x.valuation() else {
        return Ok(Rv::Infinity);
    };
    if k > x.precision() {
        return Err(PadicError::InsufficientPrecision { needed: k as i64, available: x.precision() as i64 });
    }
    Ok(Rv::Class(RvClass {
        valuation: v,
        residue: x.unit().mod_floor(&pow(x.prime(), k)),
        level: k,
    }))
}

/// Both sides of: π_k(x − z) = π_k(y − z) iff v(x − y) ≥ v(y − z) + k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prop61Sides {
    pub same_class: bool,
    pub close: bool,
}

pub fn prop61_sides(x: &PadicApprox, y: &PadicApprox, z: &PadicApprox, k: u32) -> Result<Prop61Sides, PadicError> {
    let dx = x.sub(z);
    let dy = y.sub(z);
    for (name, d) in [("x - z", &dx), ("y - z", &dy)] {
        if d.is_zero() {
            return Err(PadicError::Indistinguishable(name.to_string()));
        }
    }
    let same_class = pi_k(&dx, k)? == pi_k(&dy, k)?;
    let target = dy.valuation().expect("checked nonzero") + k as i64;
    let e = x.sub(y);
    let close = match e.valuation() {
        Some(v) => v >= target,
        None if e.absolute_precision() >= target => true,
        None => {
            return Err(PadicError::Undecidable(format!(
                "x - y vanishes mod p^{} but the threshold is {target}",
                e.absolute_precision()
            )))
        }
    };
    Ok(Prop61Sides { same_class, close })
}

/// True when the biconditional holds on (x, y, z).
pub fn check_prop61(x: &PadicApprox, y: &PadicApprox, z: &PadicApprox, k: u32) -> Result<bool, PadicError> {
    let s = prop61_sides(x, y, z, k)?;
    Ok(s.same_class == s.close)
}

/// Random element p^v·u with v in `vals` and a random unit at `precision`.
pub fn random_padic<R: Rng + ?Sized>(rng: &mut R, p: u64, vals: std::ops::RangeInclusive<i64>, precision: u32) -> PadicApprox {
    let m = pow(p, precision);
    let v = rng.gen_range(vals);
    let u = loop {
        let u = random_below(rng, &m);
        if !u.is_multiple_of(&BigInt::from(p)) {
            break u;
        }
    };
    PadicApprox::from_parts(p, v, &u, precision)
}

fn random_below<R: Rng + ?Sized>(rng: &mut R, m: &BigInt) -> BigInt {
    use num_traits::ToPrimitive;
    match m.to_u64() {
        Some(mm) => BigInt::from(rng.gen_range(0..mm)),
        None => {
            let digits = m.to_u32_digits().1.len();
            let words: Vec<u32> = (0..digits + 1).map(|_| rng.gen()).collect();
            BigInt::from_slice(num_bigint::Sign::Plus, &words).mod_floor(m)
        }
    }
}

/// A triple built so that v(y − z) and v(x − y) take controlled values:
/// y = z + p^a·u and x = y + p^b·w with a in 0..=3 and b in a..=a+k+2,
/// plus the occasional x = y.
pub fn random_triple<R: Rng + ?Sized>(rng: &mut R, p: u64, k: u32, precision: u32) -> (PadicApprox, PadicApprox, PadicApprox) {
    let z = random_padic(rng, p, 0..=2, precision);
    let a = rng.gen_range(0..=3);
    let y = z.add(&random_padic(rng, p, a..=a, precision));
    let x = if rng.gen_ratio(1, 20) {
        y.clone()
    } else {
        let b = rng.gen_range(a..=a + k as i64 + 2);
        y.add(&random_padic(rng, p, b..=b, precision))
    };
    (x, y, z)
}
