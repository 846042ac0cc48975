use std::collections::BTreeSet;

use super::{Formula, Term};

/// Appends primes to `base` until it avoids every name in `taken`.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

fn subst_term(t: &Term, var: &str, by: &Term) -> Term {
    match t {
        Term::Var(v) if v == var => by.clone(),
        Term::Var(_) | Term::Zero | Term::Const(_) => t.clone(),
        Term::Add(a, b) => Term::add(subst_term(a, var, by), subst_term(b, var, by)),
        Term::Scale(q, inner) => Term::scale(q.clone(), subst_term(inner, var, by)),
        Term::App(f, args) => {
            Term::App(f.clone(), args.iter().map(|a| subst_term(a, var, by)).collect())
        }
        Term::Proj(i, inner) => Term::proj(*i, subst_term(inner, var, by)),
    }
}

/// Capture-avoiding substitution `phi[var := by]`. Binders that would capture
/// a variable of `by` are renamed with primes.
pub fn substitute(phi: &Formula, var: &str, by: &Term) -> Formula {
    let by_vars = by.vars();
    subst_rec(phi, var, by, &by_vars)
}

fn subst_rec(phi: &Formula, var: &str, by: &Term, by_vars: &BTreeSet<String>) -> Formula {
    match phi {
        Formula::Atom(r, args) => {
            Formula::Atom(r.clone(), args.iter().map(|a| subst_term(a, var, by)).collect())
        }
        Formula::Not(f) => Formula::not(subst_rec(f, var, by, by_vars)),
        Formula::And(fs) => Formula::And(fs.iter().map(|f| subst_rec(f, var, by, by_vars)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|f| subst_rec(f, var, by, by_vars)).collect()),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let rebuild = |v: String, b: Formula| match phi {
                Formula::Exists(..) => Formula::Exists(v, Box::new(b)),
                _ => Formula::Forall(v, Box::new(b)),
            };
            if v == var || !phi.free_vars().contains(var) {
                return phi.clone();
            }
            if by_vars.contains(v) {
                let mut taken = body.free_vars();
                taken.extend(by_vars.iter().cloned());
                taken.insert(var.to_string());
                let fresh = fresh_name(v, &taken);
                let renamed = subst_rec(body, v, &Term::Var(fresh.clone()), &BTreeSet::from([fresh.clone()]));
                rebuild(fresh, subst_rec(&renamed, var, by, by_vars))
            } else {
                rebuild(v.clone(), subst_rec(body, var, by, by_vars))
            }
        }
    }
}

/// Renames bound variables so that no binder shadows another binder or a
/// free variable.
pub fn rename_apart(phi: &Formula) -> Formula {
    let mut taken = phi.free_vars();
    rename_rec(phi, &mut taken)
}

fn rename_rec(phi: &Formula, taken: &mut BTreeSet<String>) -> Formula {
    match phi {
        Formula::Atom(..) => phi.clone(),
        Formula::Not(f) => Formula::not(rename_rec(f, taken)),
        Formula::And(fs) => Formula::And(fs.iter().map(|f| rename_rec(f, taken)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|f| rename_rec(f, taken)).collect()),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let (name, body) = if taken.contains(v) {
                let fresh = fresh_name(v, taken);
                let b = substitute(body, v, &Term::Var(fresh.clone()));
                (fresh, b)
            } else {
                (v.clone(), (**body).clone())
            };
            taken.insert(name.clone());
            let body = rename_rec(&body, taken);
            match phi {
                Formula::Exists(..) => Formula::Exists(name, Box::new(body)),
                _ => Formula::Forall(name, Box::new(body)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Signature};

    fn p(s: &str) -> Formula {
        parse(s, &Signature::everything()).unwrap()
    }

    #[test]
    fn replaces_free_occurrences() {
        let out = substitute(&p("x < y"), "x", &Term::app("f", Term::var("z")));
        assert_eq!(out.to_string(), "f(z) < y");
    }

    #[test]
    fn bound_occurrences_untouched() {
        let phi = p("E x. x < y");
        assert_eq!(substitute(&phi, "x", &Term::var("z")), phi);
    }

    #[test]
    fn capture_is_avoided() {
        let out = substitute(&p("E x. x < y"), "y", &Term::var("x"));
        assert_eq!(out.to_string(), "E x'. x' < x");
    }

    #[test]
    fn rename_apart_removes_shadowing() {
        let phi = p("(E x. x < y) & (E x. y < x) & x = x");
        let out = rename_apart(&phi);
        assert_eq!(out.to_string(), "(E x'. x' < y) & (E x''. y < x'') & x = x");
    }
}
