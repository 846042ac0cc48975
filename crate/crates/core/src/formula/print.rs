use std::fmt;

use super::{Formula, Relation, Term, ValBound};
use crate::rational::format_rational;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Zero => write!(f, "0"),
            Term::Const(v) => write!(f, "{v}"),
            Term::Add(a, b) => {
                write!(f, "{a} + ")?;
                if matches!(**b, Term::Add(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Term::Scale(q, t) => {
                write!(f, "({})*", format_rational(q))?;
                if matches!(**t, Term::Add(..)) {
                    write!(f, "({t})")
                } else {
                    write!(f, "{t}")
                }
            }
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Term::Proj(i, t) => match **t {
                Term::Var(_) | Term::App(..) => write!(f, "{t}.{i}"),
                _ => write!(f, "({t}).{i}"),
            },
        }
    }
}

fn bound(b: &ValBound, inf: &str) -> String {
    match b {
        Some(v) => v.to_string(),
        None => inf.to_string(),
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, rel: &Relation, args: &[Term]) -> fmt::Result {
    let list = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    };
    match rel {
        Relation::Lt => write!(f, "{} < {}", args[0], args[1]),
        Relation::Eq => write!(f, "{} = {}", args[0], args[1]),
        Relation::P => write!(f, "P({})", args[0]),
        Relation::R(n) => {
            write!(f, "R{n}(")?;
            list(f)?;
            write!(f, ")")
        }
        Relation::Vle => {
            write!(f, "vle(")?;
            list(f)?;
            write!(f, ")")
        }
        Relation::Ann { upper, lower } => write!(
            f,
            "Ann({}, {}, {})",
            args[0],
            bound(upper, "inf"),
            bound(lower, "-inf")
        ),
        Relation::Pow { n, lambda } => write!(f, "Pow({n}, {lambda}, {})", args[0]),
        Relation::Named(name) => {
            write!(f, "{name}(")?;
            list(f)?;
            write!(f, ")")
        }
    }
}

fn needs_parens_in_junction(phi: &Formula) -> bool {
    match phi {
        Formula::And(v) | Formula::Or(v) => !v.is_empty(),
        Formula::Exists(..) | Formula::Forall(..) => true,
        _ => false,
    }
}

fn write_junction(f: &mut fmt::Formatter<'_>, parts: &[Formula], op: &str) -> fmt::Result {
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            write!(f, " {op} ")?;
        }
        if needs_parens_in_junction(p) {
            write!(f, "({p})")?;
        } else {
            write!(f, "{p}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(rel, args) => write_atom(f, rel, args),
            Formula::Not(inner) => match **inner {
                Formula::Not(_) => write!(f, "!{inner}"),
                _ if inner.is_true() || inner.is_false() => write!(f, "!{inner}"),
                _ => write!(f, "!({inner})"),
            },
            Formula::And(parts) if parts.is_empty() => write!(f, "true"),
            Formula::Or(parts) if parts.is_empty() => write!(f, "false"),
            Formula::And(parts) => write_junction(f, parts, "&"),
            Formula::Or(parts) => write_junction(f, parts, "|"),
            Formula::Exists(v, body) => write!(f, "E {v}. {body}"),
            Formula::Forall(v, body) => write!(f, "A {v}. {body}"),
        }
    }
}
