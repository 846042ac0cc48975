use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("precision exhausted: need {needed} digits, have {available}")]
    InsufficientPrecision { needed: i64, available: i64 },
    #[error("value is indistinguishable from 0 at the stored precision ({0})")]
    Indistinguishable(String),
    #[error("undecidable at the stored precision: {0}")]
    Undecidable(String),
    #[error("no k up to {largest_k} works")]
    BoundExhausted { largest_k: u32 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("mixed primes {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("bad p-adic literal `{0}`")]
    Literal(String),
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

pub fn pow(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// v_p(n) for n ≠ 0.
pub fn vp(p: u64, n: &BigInt) -> u32 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while n.is_multiple_of(&pb) {
        n /= &pb;
        v += 1;
    }
    v
}

/// Inverse of a unit modulo m.
pub fn inverse_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// x = p^valuation · unit + O(p^(valuation + precision)), or a value known
/// to be divisible by p^zero_bound when `valuation` is `None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicApprox {
    prime: u64,
    valuation: Option<i64>,
    unit: BigInt,
    precision: u32,
    zero_bound: i64,
}

/// Absolute precision attached to exact zeros.
const EXACT: i64 = i64::MAX / 4;

impl PadicApprox {
    pub fn zero(prime: u64) -> PadicApprox {
        PadicApprox::zero_mod(prime, EXACT)
    }

    /// A value known only to lie in p^bound·ℤ_p.
    pub fn zero_mod(prime: u64, bound: i64) -> PadicApprox {
        PadicApprox { prime, valuation: None, unit: BigInt::zero(), precision: 0, zero_bound: bound }
    }

    /// p^valuation · unit with `precision` relative digits; `unit` must be
    /// prime to p.
    pub fn from_parts(prime: u64, valuation: i64, unit: &BigInt, precision: u32) -> PadicApprox {
        assert!(precision >= 1, "precision must be positive");
        let m = pow(prime, precision);
        let u = unit.mod_floor(&m);
        assert!(!u.is_multiple_of(&BigInt::from(prime)), "unit part divisible by p");
        PadicApprox { prime, valuation: Some(valuation), unit: u, precision, zero_bound: 0 }
    }

    pub fn from_integer(prime: u64, n: &BigInt, precision: u32) -> PadicApprox {
        if n.is_zero() {
            return PadicApprox::zero(prime);
        }
        let v = vp(prime, n);
        PadicApprox::from_parts(prime, v as i64, &(n / pow(prime, v)), precision)
    }

    pub fn from_i64(prime: u64, n: i64, precision: u32) -> PadicApprox {
        PadicApprox::from_integer(prime, &BigInt::from(n), precision)
    }

    pub fn from_rational(prime: u64, q: &Rational, precision: u32) -> PadicApprox {
        if q.is_zero() {
            return PadicApprox::zero(prime);
        }
        let (num, den) = (q.numer(), q.denom());
        let (vn, vd) = (vp(prime, num), vp(prime, den));
        let m = pow(prime, precision);
        let un = num / pow(prime, vn);
        let ud = den / pow(prime, vd);
        let u = (un * inverse_mod(&ud, &m)).mod_floor(&m);
        PadicApprox::from_parts(prime, vn as i64 - vd as i64, &u, precision)
    }

    /// Parses `p^v * u`, `u` or `0`, with the prime and precision supplied.
    pub fn parse(text: &str, prime: u64, precision: u32) -> Result<PadicApprox, PadicError> {
        let bad = || PadicError::Literal(text.to_string());
        let t = text.trim();
        let (v, u) = match t.split_once('*') {
            Some((pv, u)) => {
                let (base, exp) = pv.trim().split_once('^').ok_or_else(bad)?;
                if base.trim().parse::<u64>().map_err(|_| bad())? != prime {
                    return Err(bad());
                }
                (exp.trim().parse::<i64>().map_err(|_| bad())?, u.trim())
            }
            None => (0, t),
        };
        let u: BigInt = u.parse().map_err(|_| bad())?;
        if u.is_zero() {
            return Ok(PadicApprox::zero(prime));
        }
        let inner = PadicApprox::from_integer(prime, &u, precision);
        Ok(inner.shift(v))
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// `None` when the value is 0 at the stored precision.
    pub fn valuation(&self) -> Option<i64> {
        self.valuation
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    /// Relative precision; 0 for zero approximations.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The value is known modulo p^absolute_precision.
    pub fn absolute_precision(&self) -> i64 {
        match self.valuation {
            Some(v) => v + self.precision as i64,
            None => self.zero_bound,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.valuation.is_none()
    }

    /// Multiplication by p^s.
    pub fn shift(&self, s: i64) -> PadicApprox {
        let mut out = self.clone();
        match out.valuation.as_mut() {
            Some(v) => *v += s,
            None if out.zero_bound != EXACT => out.zero_bound += s,
            None => {}
        }
        out
    }

    /// Drops digits so that the absolute precision is at most `abs`.
    pub fn truncate(&self, abs: i64) -> PadicApprox {
        match self.valuation {
            None => PadicApprox::zero_mod(self.prime, self.zero_bound.min(abs)),
            Some(v) if abs <= v => PadicApprox::zero_mod(self.prime, abs),
            Some(v) => {
                let prec = ((abs - v) as u32).min(self.precision);
                PadicApprox::from_parts(self.prime, v, &self.unit, prec)
            }
        }
    }

    fn check_prime(&self, other: &PadicApprox) {
        assert_eq!(self.prime, other.prime, "mixed primes");
    }

    pub fn add(&self, other: &PadicApprox) -> PadicApprox {
        self.check_prime(other);
        let n = self.absolute_precision().min(other.absolute_precision());
        let (vx, vy) = match (self.valuation, other.valuation) {
            (None, _) => return other.truncate(n),
            (_, None) => return self.truncate(n),
            (Some(a), Some(b)) => (a, b),
        };
        let m = vx.min(vy);
        if n <= m {
            return PadicApprox::zero_mod(self.prime, n);
        }
        let width = (n - m) as u32;
        let modulus = pow(self.prime, width);
        let s = (&self.unit * pow(self.prime, (vx - m) as u32)
            + &other.unit * pow(self.prime, (vy - m) as u32))
            .mod_floor(&modulus);
        if s.is_zero() {
            return PadicApprox::zero_mod(self.prime, n);
        }
        let e = vp(self.prime, &s);
        let v = m + e as i64;
        PadicApprox::from_parts(self.prime, v, &(s / pow(self.prime, e)), (n - v) as u32)
    }

    pub fn neg(&self) -> PadicApprox {
        match self.valuation {
            None => self.clone(),
            Some(v) => PadicApprox::from_parts(self.prime, v, &-&self.unit, self.precision),
        }
    }

    pub fn sub(&self, other: &PadicApprox) -> PadicApprox {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicApprox) -> PadicApprox {
        self.check_prime(other);
        match (self.valuation, other.valuation) {
            (Some(a), Some(b)) => {
                let prec = self.precision.min(other.precision);
                PadicApprox::from_parts(self.prime, a + b, &(&self.unit * &other.unit), prec)
            }
            (None, None) => PadicApprox::zero_mod(self.prime, sat_add(self.zero_bound, other.zero_bound)),
            (None, Some(b)) => PadicApprox::zero_mod(self.prime, sat_add(self.zero_bound, b)),
            (Some(a), None) => PadicApprox::zero_mod(self.prime, sat_add(other.zero_bound, a)),
        }
    }

    /// Multiplication by a rational, at this value's precision.
    pub fn scale(&self, q: &Rational) -> PadicApprox {
        if q.is_zero() {
            return PadicApprox::zero(self.prime);
        }
        let prec = self.precision.max(1);
        self.mul(&PadicApprox::from_rational(self.prime, q, prec))
    }

    /// Representative integer of the value when it is integral.
    pub fn to_integer(&self) -> Option<BigInt> {
        match self.valuation {
            None => Some(BigInt::zero()),
            Some(v) if v >= 0 => Some(&self.unit * pow(self.prime, v as u32)),
            Some(_) => None,
        }
    }
}

fn sat_add(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        a + b
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.valuation {
            None => write!(f, "0"),
            Some(v) => write!(f, "{}^{} * {}", self.prime, v, self.unit),
        }
    }
}

/// Nonnegative residue of an integer value modulo p^k, when defined.
pub fn residue(x: &PadicApprox, k: u32) -> Option<BigInt> {
    let n = x.to_integer()?;
    Some(n.mod_floor(&pow(x.prime(), k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn construction() {
        let x = PadicApprox::from_i64(3, 18, 5);
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.unit(), &BigInt::from(2));
        let h = PadicApprox::from_rational(3, &rat(1, 2), 4);
        assert_eq!(h.valuation(), Some(0));
        // 2 · 41 = 82 ≡ 1 mod 81
        assert_eq!(h.unit(), &BigInt::from(41));
        let t = PadicApprox::from_rational(5, &rat(3, 25), 3);
        assert_eq!(t.valuation(), Some(-2));
    }

    #[test]
    fn arithmetic_tracks_precision() {
        let a = PadicApprox::from_i64(3, 1, 6);
        let b = PadicApprox::from_i64(3, 4, 6);
        let d = b.sub(&a);
        assert_eq!(d.valuation(), Some(1));
        assert_eq!(d.precision(), 5);
        assert_eq!(d.absolute_precision(), 6);
        let z = a.sub(&a);
        assert!(z.is_zero());
        assert_eq!(z.absolute_precision(), 6);
        let p = PadicApprox::from_i64(3, 6, 4).mul(&PadicApprox::from_i64(3, 15, 4));
        assert_eq!(p, PadicApprox::from_i64(3, 90, 4));
    }

    #[test]
    fn valuation_of_sum() {
        let a = PadicApprox::from_i64(2, 4, 8);
        let b = PadicApprox::from_i64(2, 6, 8);
        assert_eq!(a.add(&b).valuation(), Some(1));
        let c = PadicApprox::from_i64(2, 12, 8);
        assert_eq!(a.add(&c).valuation(), Some(4));
    }

    #[test]
    fn literal() {
        let x = PadicApprox::parse("3^2 * 5", 3, 6).unwrap();
        assert_eq!(x, PadicApprox::from_i64(3, 45, 6));
        assert_eq!(PadicApprox::parse(&x.to_string(), 3, 6).unwrap(), x);
        assert!(PadicApprox::parse("2^1 * 5", 3, 6).is_err());
        assert!(PadicApprox::parse("0", 3, 6).unwrap().is_zero());
    }
}
