use num_traits::{Signed, Zero};

use super::block::{paper_rule, ExistsBlock};
use super::term::{normalize_term, NormalTerm};
use super::{QeError, Rule};
use crate::formula::{Formula, Relation};
use crate::rational::Rational;

/// Largest disjunctive form any single elimination step may build.
pub const MAX_DISJUNCTS: usize = 1 << 16;

/// `lhs < rhs` or `lhs = rhs` after negations are resolved by trichotomy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub strict: bool,
    pub lhs: NormalTerm,
    pub rhs: NormalTerm,
}

impl Literal {
    fn diff(&self) -> NormalTerm {
        self.rhs.sub(&self.lhs)
    }

    /// Truth value when no variable survives in rhs − lhs.
    fn ground_value(&self) -> Option<bool> {
        let d = self.diff();
        d.is_ground().then(|| if self.strict { d.constant > crate::structures::LexPoint::zero() } else { d.constant.is_zero() })
    }

    pub fn to_formula(&self) -> Formula {
        match self.ground_value() {
            Some(true) => Formula::truth(),
            Some(false) => Formula::falsity(),
            None if self.strict => Formula::lt(self.lhs.to_term(), self.rhs.to_term()),
            None => Formula::eq(self.lhs.to_term(), self.rhs.to_term()),
        }
    }
}

pub(crate) fn and_all(parts: Vec<Formula>) -> Formula {
    let mut out: Vec<Formula> = Vec::new();
    for p in parts {
        match p {
            Formula::And(inner) => {
                for q in inner {
                    if q.is_false() {
                        return Formula::falsity();
                    }
                    if !out.contains(&q) {
                        out.push(q);
                    }
                }
            }
            p if p.is_false() => return Formula::falsity(),
            p => {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
    }
    Formula::and(out)
}

pub(crate) fn or_all(parts: Vec<Formula>) -> Formula {
    let mut out: Vec<Formula> = Vec::new();
    for p in parts {
        match p {
            Formula::Or(inner) => {
                for q in inner {
                    if q.is_true() {
                        return Formula::truth();
                    }
                    if !out.contains(&q) {
                        out.push(q);
                    }
                }
            }
            p if p.is_true() => return Formula::truth(),
            p => {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
    }
    Formula::or(out)
}

fn product(a: Vec<Vec<Literal>>, b: Vec<Vec<Literal>>) -> Result<Vec<Vec<Literal>>, QeError> {
    if a.len().saturating_mul(b.len()) > MAX_DISJUNCTS {
        return Err(QeError::TooLarge(a.len() * b.len()));
    }
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            let mut c = x.clone();
            c.extend(y.iter().cloned());
            out.push(c);
        }
    }
    Ok(out)
}

/// Disjunctive form over positive `<` and `=` literals. Ground literals are
/// decided on the spot.
pub fn dnf(phi: &Formula, positive: bool) -> Result<Vec<Vec<Literal>>, QeError> {
    let lit = |strict: bool, l: &NormalTerm, r: &NormalTerm| -> Vec<Vec<Literal>> {
        let lit = Literal { strict, lhs: l.clone(), rhs: r.clone() };
        match lit.ground_value() {
            Some(true) => vec![vec![]],
            Some(false) => vec![],
            None => vec![vec![lit]],
        }
    };
    match phi {
        Formula::Atom(rel, args) => {
            let (a, b) = match args.as_slice() {
                [a, b] => (normalize_term(a)?, normalize_term(b)?),
                _ => return Err(QeError::Unsupported(format!("atom {phi}"))),
            };
            let mut out = Vec::new();
            match (rel, positive) {
                (Relation::Lt, true) => out.extend(lit(true, &a, &b)),
                (Relation::Lt, false) => {
                    out.extend(lit(true, &b, &a));
                    out.extend(lit(false, &a, &b));
                }
                (Relation::Eq, true) => out.extend(lit(false, &a, &b)),
                (Relation::Eq, false) => {
                    out.extend(lit(true, &a, &b));
                    out.extend(lit(true, &b, &a));
                }
                _ => return Err(QeError::Unsupported(format!("relation in {phi}"))),
            }
            Ok(out)
        }
        Formula::Not(f) => dnf(f, !positive),
        Formula::And(fs) | Formula::Or(fs) => {
            let conj = matches!(phi, Formula::And(_)) == positive;
            if conj {
                let mut acc = vec![vec![]];
                for f in fs {
                    acc = product(acc, dnf(f, positive)?)?;
                    if acc.is_empty() {
                        break;
                    }
                }
                Ok(acc)
            } else {
                let mut acc = Vec::new();
                for f in fs {
                    acc.extend(dnf(f, positive)?);
                    if acc.len() > MAX_DISJUNCTS {
                        return Err(QeError::TooLarge(acc.len()));
                    }
                }
                Ok(acc)
            }
        }
        Formula::Exists(..) | Formula::Forall(..) => {
            Err(QeError::Unsupported("quantifier inside a body that should be quantifier-free".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    Column,
    Height,
}

impl Axis {
    fn project(self, t: &NormalTerm) -> NormalTerm {
        match self {
            Axis::Column => t.column(),
            Axis::Height => t.height(),
        }
    }
}

/// coeff · x_axis + rest_axis ⋈ 0 with ⋈ being `>` (strict) or `=`.
#[derive(Clone, Debug)]
struct AxisConstraint {
    axis: Axis,
    coeff: Rational,
    rest: NormalTerm,
    strict: bool,
}

impl AxisConstraint {
    /// The constraint alone when the coordinate of x does not occur.
    fn free_formula(&self) -> Formula {
        let r = self.axis.project(&self.rest);
        Literal { strict: self.strict, lhs: NormalTerm::zero(), rhs: r }.to_formula()
    }
}

/// Splits rhs − lhs = αx + βf(x) + r into coordinate alternatives. With
/// x = (a, b) the difference is ((α−β)a + r₁, (α+β)b + r₂), and a pair is
/// positive iff its first coordinate is, or that vanishes and the second is.
fn alternatives(x: &str, lit: &Literal) -> Vec<Vec<AxisConstraint>> {
    let d = lit.diff();
    let (alpha, beta) = d.coefficients(x);
    let rest = d.without(x);
    let col = |strict| AxisConstraint { axis: Axis::Column, coeff: &alpha - &beta, rest: rest.clone(), strict };
    let ht = |strict| AxisConstraint { axis: Axis::Height, coeff: &alpha + &beta, rest: rest.clone(), strict };
    if lit.strict {
        vec![vec![col(true)], vec![col(false), ht(true)]]
    } else {
        vec![vec![col(false), ht(false)]]
    }
}

/// ∃v over one dense axis: lower, upper and equality bounds.
fn fourier_motzkin(cons: &[&AxisConstraint]) -> Formula {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut equal = Vec::new();
    let mut free = Vec::new();
    for c in cons {
        if c.coeff.is_zero() {
            free.push(c.free_formula());
            continue;
        }
        let bound = c.axis.project(&c.rest).scale(&(-Rational::from_integer(1.into()) / &c.coeff));
        if !c.strict {
            equal.push(bound);
        } else if c.coeff.is_positive() {
            lower.push(bound);
        } else {
            upper.push(bound);
        }
    }
    let cmp = |strict, l: &NormalTerm, r: &NormalTerm| Literal { strict, lhs: l.clone(), rhs: r.clone() }.to_formula();
    let mut parts = free;
    if let Some(e) = equal.first() {
        parts.extend(equal[1..].iter().map(|o| cmp(false, e, o)));
        parts.extend(lower.iter().map(|l| cmp(true, l, e)));
        parts.extend(upper.iter().map(|u| cmp(true, e, u)));
    } else {
        for l in &lower {
            for u in &upper {
                parts.push(cmp(true, l, u));
            }
        }
    }
    and_all(parts)
}

/// ∃x of a conjunction of literals, decided coordinate by coordinate.
pub fn eliminate_conjunction(x: &str, lits: &[Literal]) -> Result<Formula, QeError> {
    let mut keep = Vec::new();
    let mut choices: Vec<Vec<Vec<AxisConstraint>>> = Vec::new();
    for l in lits {
        if l.diff().mentions(x) {
            choices.push(alternatives(x, l));
        } else {
            keep.push(l.to_formula());
        }
    }
    let total: usize = choices.iter().map(Vec::len).product();
    if total > MAX_DISJUNCTS {
        return Err(QeError::TooLarge(total));
    }
    let mut branches = Vec::with_capacity(total);
    let mut idx = vec![0usize; choices.len()];
    loop {
        let picked: Vec<&AxisConstraint> = idx.iter().zip(&choices).flat_map(|(&i, c)| c[i].iter()).collect();
        let cols: Vec<&AxisConstraint> = picked.iter().copied().filter(|c| c.axis == Axis::Column).collect();
        let hts: Vec<&AxisConstraint> = picked.iter().copied().filter(|c| c.axis == Axis::Height).collect();
        branches.push(and_all(vec![fourier_motzkin(&cols), fourier_motzkin(&hts)]));
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            break;
        }
    }
    keep.push(or_all(branches));
    Ok(and_all(keep))
}

/// The conjunction as a single block when it has that exact shape: at most
/// one strict bound of each kind on x and on f(x), plus x-free literals.
pub fn as_block(x: &str, lits: &[Literal]) -> Option<(ExistsBlock, Vec<Literal>)> {
    let one = Rational::from_integer(1.into());
    let zero = Rational::zero();
    let mut block = ExistsBlock::unbounded(x);
    let mut rest = Vec::new();
    for l in lits {
        let d = l.diff();
        if !d.mentions(x) {
            rest.push(l.clone());
            continue;
        }
        if !l.strict {
            return None;
        }
        let r = d.without(x);
        let (a, b) = d.coefficients(x);
        let slot = if a == one && b == zero {
            (&mut block.s0, r.neg())
        } else if a == -&one && b == zero {
            (&mut block.s1, r)
        } else if a == zero && b == one {
            (&mut block.t0, r.neg())
        } else if a == zero && b == -&one {
            (&mut block.t1, r)
        } else {
            return None;
        };
        if slot.0.is_some() {
            return None;
        }
        *slot.0 = Some(slot.1);
    }
    Some((block, rest))
}

/// ∃x. body for a quantifier-free body.
pub fn eliminate_exists_qf(x: &str, body: &Formula, rule: Rule) -> Result<Formula, QeError> {
    if !body.free_vars().contains(x) {
        return Ok(body.clone());
    }
    let mut out = Vec::new();
    for conj in dnf(body, true)? {
        let shaped = if rule == Rule::Paper { as_block(x, &conj) } else { None };
        out.push(match shaped {
            Some((block, rest)) => {
                let mut parts: Vec<Formula> = rest.iter().map(Literal::to_formula).collect();
                parts.push(paper_rule(&block));
                and_all(parts)
            }
            None => eliminate_conjunction(x, &conj)?,
        });
    }
    Ok(or_all(out))
}

/// Removes every quantifier, innermost first. Quantifier-free input comes
/// back unchanged.
pub fn eliminate_all(phi: &Formula, rule: Rule) -> Result<Formula, QeError> {
    if phi.is_quantifier_free() {
        return Ok(phi.clone());
    }
    Ok(match phi {
        Formula::Atom(..) => phi.clone(),
        Formula::Not(f) => Formula::not(eliminate_all(f, rule)?),
        Formula::And(fs) => Formula::And(fs.iter().map(|f| eliminate_all(f, rule)).collect::<Result<_, _>>()?),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|f| eliminate_all(f, rule)).collect::<Result<_, _>>()?),
        Formula::Exists(x, body) => eliminate_exists_qf(x, &eliminate_all(body, rule)?, rule)?,
        Formula::Forall(x, body) => {
            let inner = Formula::not(eliminate_all(body, rule)?);
            match eliminate_exists_qf(x, &inner, rule)? {
                f if f.is_true() => Formula::falsity(),
                f if f.is_false() => Formula::truth(),
                f => Formula::not(f),
            }
        }
    })
}
