use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::HahnSeries;
use crate::rational::{ceil, is_integer, Rational};

/// `P(a)`: the valuation is an integer. The zero series counts as a member
/// so that `0 ∈ P` holds, even though v(0) = +∞.
pub fn hseries_p(a: &HahnSeries) -> bool {
    match a.valuation() {
        None => true,
        Some(v) => is_integer(v),
    }
}

/// `[a]`: the union of the convex P or ¬P component holding `a` with its
/// reflection through 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ClassId {
    Zero,
    /// v(a) = n.
    Int(BigInt),
    /// n − 1 < v(a) < n.
    Gap(BigInt),
}

impl ClassId {
    /// Position on the ladder of nonzero classes. Larger elements have
    /// smaller valuations and larger ladder positions; consecutive classes
    /// differ by one.
    pub fn ladder(&self) -> Option<BigInt> {
        match self {
            ClassId::Zero => None,
            ClassId::Int(n) => Some(-(n * BigInt::from(2))),
            ClassId::Gap(n) => Some(-(n * BigInt::from(2)) + 1),
        }
    }

    pub fn in_p(&self) -> bool {
        !matches!(self, ClassId::Gap(_))
    }
}

impl Ord for ClassId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.ladder(), other.ladder()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.cmp(&b),
        }
    }
}

impl PartialOrd for ClassId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassId::Zero => write!(f, "[0]"),
            ClassId::Int(n) => write!(f, "int({n})"),
            ClassId::Gap(n) => write!(f, "gap({n})"),
        }
    }
}

pub fn class_of(a: &HahnSeries) -> ClassId {
    match a.valuation() {
        None => ClassId::Zero,
        Some(v) if is_integer(v) => ClassId::Int(v.to_integer()),
        Some(v) => ClassId::Gap(ceil(v)),
    }
}

/// Same convex component of P or ¬P.
pub fn same_component(x: &HahnSeries, y: &HahnSeries) -> bool {
    x.signum() == y.signum() && class_of(x) == class_of(y)
}

/// The n with `R_n(x, y)`, if any. `Some(0)` iff x and y share a component;
/// otherwise x < y on one side of 0 gives the number of component
/// boundaries crossed. Intervals through 0 cross infinitely many
/// components, so no `R_n` holds.
pub fn compute_rn(x: &HahnSeries, y: &HahnSeries) -> Option<u64> {
    if same_component(x, y) {
        return Some(0);
    }
    if x >= y || x.signum() != y.signum() || x.is_zero() {
        return None;
    }
    let lx = class_of(x).ladder()?;
    let ly = class_of(y).ladder()?;
    let d = if x.signum() > 0 { ly - lx } else { lx - ly };
    d.to_u64()
}

/// Independent oracle for `R_n`: walks a dense sample of points between x
/// and y (the endpoints plus ±t^(k/4) over a window around their
/// valuations) and counts how often P flips. If widening the window changes
/// the count, the interval meets infinitely many components.
pub fn rn_chain_oracle(x: &HahnSeries, y: &HahnSeries) -> Option<u64> {
    if x == y {
        return Some(0);
    }
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let vals: Vec<&Rational> = [lo, hi].iter().filter_map(|s| s.valuation()).collect();
    let (vmin, vmax) = match (vals.iter().min(), vals.iter().max()) {
        (Some(a), Some(b)) => ((*a).clone(), (*b).clone()),
        _ => return Some(0),
    };
    let near = flips_between(lo, hi, &vmin, &vmax, 1);
    let wide = flips_between(lo, hi, &vmin, &vmax, 3);
    if near != wide {
        return None;
    }
    match x.cmp(y) {
        Ordering::Less => Some(near),
        _ if near == 0 => Some(0),
        _ => None,
    }
}

fn flips_between(lo: &HahnSeries, hi: &HahnSeries, vmin: &Rational, vmax: &Rational, margin: i64) -> u64 {
    let four = Rational::from_integer(4.into());
    let start = ((vmin - Rational::from_integer(margin.into())) * &four).floor().to_integer();
    let end = ((vmax + Rational::from_integer(margin.into())) * &four).ceil().to_integer();
    let mut pts = vec![lo.clone(), hi.clone(), HahnSeries::zero()];
    let mut k = start;
    while k <= end {
        let e = Rational::new(k.clone(), 4.into());
        let m = HahnSeries::t(e);
        pts.push(m.neg());
        pts.push(m);
        k += 1;
    }
    pts.retain(|p| lo <= p && p <= hi);
    pts.sort();
    pts.dedup();
    pts.windows(2).filter(|w| hseries_p(&w[0]) != hseries_p(&w[1])).count() as u64
}

/// Outcome of checking the three class-arithmetic clauses on one pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lemma51Report {
    /// Clauses that applied to the pair.
    pub checked: Vec<u8>,
    pub violations: Vec<String>,
}

impl Lemma51Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn lemma51_scalars() -> Vec<Rational> {
    [(1, 1), (-1, 1), (2, 1), (-3, 1), (1, 2), (-5, 7)]
        .into_iter()
        .map(|(n, d)| Rational::new(n.into(), d.into()))
        .collect()
}

pub fn check_lemma51(a: &HahnSeries, b: &HahnSeries) -> Lemma51Report {
    let mut rep = Lemma51Report::default();
    let (ca, cb) = (class_of(a), class_of(b));
    let sum = a.add(b);
    if ca < cb {
        rep.checked.push(1);
        if class_of(&sum) != cb {
            rep.violations.push(format!("clause 1: [{a}] < [{b}] but a+b = {sum} lies in {}", class_of(&sum)));
        }
    }
    if ca == cb {
        rep.checked.push(2);
        if class_of(&sum) > ca {
            rep.violations.push(format!("clause 2: [a] = [b] = {ca} but a+b = {sum} lies in {}", class_of(&sum)));
        }
    }
    rep.checked.push(3);
    let scalars = lemma51_scalars();
    if !a.is_zero() {
        for q in &scalars {
            let qa = a.scale(q);
            if class_of(&qa) != ca {
                rep.violations.push(format!("clause 3: ({q})*a leaves {ca}"));
            }
        }
    }
    // Combinations of members of [a]_≤ stay in [a]_≤.
    let top = ca.clone().max(cb.clone());
    for q in &scalars {
        for r in &scalars {
            let z = a.scale(q).add(&b.scale(r));
            if class_of(&z) > top {
                rep.violations.push(format!("clause 3: ({q})*a + ({r})*b = {z} escapes {top}"));
            }
        }
    }
    rep
}

/// |a| < |b| with a and b in distinct classes.
pub fn strictly_smaller_class(a: &HahnSeries, b: &HahnSeries) -> bool {
    a.abs() < b.abs() && !same_component(&a.abs(), &b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn t(n: i64, d: i64) -> HahnSeries {
        HahnSeries::t(rat(n, d))
    }

    #[test]
    fn predicate_p() {
        assert!(hseries_p(&t(1, 1)));
        assert!(!hseries_p(&t(1, 2)));
        assert!(!hseries_p(&t(1, 2).add(&t(1, 1))));
        assert!(hseries_p(&HahnSeries::zero()));
    }

    #[test]
    fn classes() {
        assert_eq!(class_of(&t(2, 1)), ClassId::Int(2.into()));
        assert_eq!(class_of(&t(3, 4)), ClassId::Gap(1.into()));
        assert_eq!(class_of(&HahnSeries::zero()), ClassId::Zero);
        assert!(class_of(&t(1, 1)) < class_of(&t(1, 2)));
        assert!(ClassId::Zero < class_of(&t(100, 1)));
        assert_eq!(class_of(&t(-1, 2)), ClassId::Gap(0.into()));
    }

    #[test]
    fn rn_examples() {
        assert_eq!(compute_rn(&t(1, 1), &t(3, 4)), Some(1));
        let x = t(1, 1);
        assert_eq!(compute_rn(&x, &x.scale(&int(3))), Some(0));
        assert_eq!(compute_rn(&t(2, 1), &t(1, 1)), Some(2));
        assert_eq!(compute_rn(&t(1, 1), &t(2, 1)), None);
        assert_eq!(compute_rn(&t(1, 1).neg(), &t(1, 1)), None);
        assert_eq!(compute_rn(&t(1, 1).neg(), &t(2, 1).neg()), Some(2));
        for (a, b) in [(t(1, 1), t(3, 4)), (t(2, 1), t(1, 1)), (t(1, 1).neg(), t(1, 1))] {
            assert_eq!(rn_chain_oracle(&a, &b), compute_rn(&a, &b));
        }
    }

    #[test]
    fn lemma51_examples() {
        assert!(check_lemma51(&t(1, 1), &t(1, 2)).ok());
        let b = t(1, 1).neg().add(&t(3, 2));
        let rep = check_lemma51(&t(1, 1), &b);
        assert!(rep.checked.contains(&2) && rep.ok());
        assert!(check_lemma51(&HahnSeries::zero(), &t(5, 3)).ok());
    }
}
