//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! formula := ("E"|"A") ident "." formula | disj
//! disj    := conj ("|" conj)*
//! conj    := unary ("&" unary)*
//! unary   := "!" unary | quant | "(" formula ")" | "true" | "false" | atom
//! atom    := term ("<"|"="|">") term | "P(" term ")" | "R" nat "(" term "," term ")"
//!          | "vle(" term "," term ")" | "Ann(" term "," bound "," bound ")"
//!          | "Pow(" nat "," nat "," term ")" | Rel "(" term,* ")"
//! term    := scaled ("+" scaled)*
//! scaled  := "(" rational ")*" scaled | postfix
//! postfix := primary ("." ("1"|"2"))*
//! primary := ident | ident "(" term,* ")" | rational | "(" rational "," rational ")" | "(" term ")"
//! ```

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{Builtin, Formula, Relation, Signature, Term, ValBound};
use crate::rational::Rational;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at offset {offset}")]
    UnknownSymbol { offset: usize, name: String },
    #[error("`{name}` at offset {offset} expects {expected} argument(s), found {found}")]
    Arity { offset: usize, name: String, expected: usize, found: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownSymbol { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(BigInt),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if text[i..].starts_with("-inf")
            && !text[i + 4..].starts_with(|d: char| d.is_ascii_alphanumeric() || d == '_')
        {
            out.push((Tok::Ident("-inf".to_string()), i));
            i += 4;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() {
                let d = bytes[i] as char;
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if c.is_ascii_digit()
            || (c == '-' && i + 1 < bytes.len() && (bytes[i + 1] as char).is_ascii_digit())
        {
            let start = i;
            i += 1;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((Tok::Num(n), start));
        } else if "(),.*+<=>&|!/".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(ParseError::Syntax {
                offset: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    sig: &'a Signature,
}

type PResult<T> = Result<T, ParseError>;

fn furthest(a: ParseError, b: ParseError) -> ParseError {
    if b.offset() > a.offset() {
        b
    } else {
        a
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax { offset: self.offset(), message: message.into() })
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn expect_sym(&mut self, c: char) -> PResult<()> {
        if self.is_sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.syntax(format!("expected `{c}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.syntax("expected identifier"),
        }
    }

    fn require(&self, b: Builtin, what: &str, offset: usize) -> PResult<()> {
        if self.sig.has(b) {
            Ok(())
        } else {
            Err(ParseError::UnknownSymbol { offset, name: what.to_string() })
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        if let Some(q) = self.quantifier()? {
            return Ok(q);
        }
        let mut parts = vec![self.conj()?];
        while self.is_sym('|') {
            self.pos += 1;
            parts.push(self.conj()?);
        }
        Ok(Formula::or(parts))
    }

    fn quantifier(&mut self) -> PResult<Option<Formula>> {
        let kind = match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Ident(k)), Some(Tok::Ident(_))) if k == "E" || k == "A" => k.clone(),
            _ => return Ok(None),
        };
        self.pos += 1;
        let var = self.ident()?;
        self.expect_sym('.')?;
        let body = self.formula()?;
        Ok(Some(if kind == "E" {
            Formula::Exists(var, Box::new(body))
        } else {
            Formula::Forall(var, Box::new(body))
        }))
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut parts = vec![self.unary()?];
        while self.is_sym('&') {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.is_sym('!') {
            self.pos += 1;
            return Ok(Formula::not(self.unary()?));
        }
        if let Some(q) = self.quantifier()? {
            return Ok(q);
        }
        match self.peek() {
            Some(Tok::Ident(k)) if k == "true" => {
                self.pos += 1;
                return Ok(Formula::truth());
            }
            Some(Tok::Ident(k)) if k == "false" => {
                self.pos += 1;
                return Ok(Formula::falsity());
            }
            _ => {}
        }
        if self.is_sym('(') {
            let save = self.pos;
            self.pos += 1;
            let grouped = self.formula().and_then(|f| {
                self.expect_sym(')')?;
                Ok(f)
            });
            let continues_as_term = matches!(
                self.peek(),
                Some(Tok::Sym('<' | '=' | '>' | '+' | '*' | '.'))
            );
            match grouped {
                Ok(f) if !continues_as_term => return Ok(f),
                Ok(_) => {
                    self.pos = save;
                    return self.atom();
                }
                Err(e) => {
                    self.pos = save;
                    return self.atom().map_err(|e2| furthest(e, e2));
                }
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Formula> {
        let start = self.offset();
        if let (Some(Tok::Ident(name)), Some(Tok::Sym('('))) = (self.peek(), self.peek_at(1)) {
            let name = name.clone();
            if let Some(f) = self.special_atom(&name, start)? {
                return Ok(f);
            }
        }
        let lhs = self.term()?;
        let op_off = self.offset();
        let rel = match self.peek() {
            Some(Tok::Sym('<')) => '<',
            Some(Tok::Sym('=')) => '=',
            Some(Tok::Sym('>')) => '>',
            _ => return self.syntax("expected `<`, `=` or `>`"),
        };
        self.pos += 1;
        let rhs = self.term()?;
        match rel {
            '=' => Ok(Formula::eq(lhs, rhs)),
            '<' => {
                self.require(Builtin::Order, "<", op_off)?;
                Ok(Formula::lt(lhs, rhs))
            }
            _ => {
                self.require(Builtin::Order, ">", op_off)?;
                Ok(Formula::lt(rhs, lhs))
            }
        }
    }

    /// Keyword and named-relation atoms; `None` when `name(` starts a term.
    fn special_atom(&mut self, name: &str, start: usize) -> PResult<Option<Formula>> {
        let rn = name
            .strip_prefix('R')
            .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()));
        let f = if name == "P" && !self.sig.functions.contains_key("P") {
            self.require(Builtin::P, "P", start)?;
            self.pos += 2;
            let t = self.term()?;
            self.expect_sym(')')?;
            Formula::Atom(Relation::P, vec![t])
        } else if let Some(digits) = rn.filter(|_| !self.sig.functions.contains_key(name)) {
            self.require(Builtin::Rn, name, start)?;
            let n: u32 = digits.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: "R index out of range".into(),
            })?;
            self.pos += 2;
            let a = self.term()?;
            self.expect_sym(',')?;
            let b = self.term()?;
            self.expect_sym(')')?;
            Formula::Atom(Relation::R(n), vec![a, b])
        } else if name == "vle" {
            self.require(Builtin::Vle, name, start)?;
            self.pos += 2;
            let a = self.term()?;
            self.expect_sym(',')?;
            let b = self.term()?;
            self.expect_sym(')')?;
            Formula::Atom(Relation::Vle, vec![a, b])
        } else if name == "Ann" {
            self.require(Builtin::Ann, name, start)?;
            self.pos += 2;
            let t = self.term()?;
            self.expect_sym(',')?;
            let upper = self.val_bound("inf")?;
            self.expect_sym(',')?;
            let lower = self.val_bound("-inf")?;
            self.expect_sym(')')?;
            Formula::Atom(Relation::Ann { upper, lower }, vec![t])
        } else if name == "Pow" {
            self.require(Builtin::Pow, name, start)?;
            self.pos += 2;
            let n = self.nat()?;
            self.expect_sym(',')?;
            let lambda = self.nat()?;
            self.expect_sym(',')?;
            let t = self.term()?;
            self.expect_sym(')')?;
            let n = u32::try_from(n).ok().filter(|n| *n >= 1).ok_or(ParseError::Syntax {
                offset: start,
                message: "Pow power must be a positive integer".into(),
            })?;
            Formula::Atom(Relation::Pow { n, lambda }, vec![t])
        } else if let Some(&arity) = self.sig.relations.get(name) {
            self.pos += 2;
            let args = self.term_list()?;
            if args.len() != arity {
                return Err(ParseError::Arity {
                    offset: start,
                    name: name.to_string(),
                    expected: arity,
                    found: args.len(),
                });
            }
            Formula::Atom(Relation::Named(name.to_string()), args)
        } else if self.sig.functions.contains_key(name) {
            return Ok(None);
        } else {
            return Err(ParseError::UnknownSymbol { offset: start, name: name.to_string() });
        };
        Ok(Some(f))
    }

    fn nat(&mut self) -> PResult<u64> {
        match self.peek() {
            Some(Tok::Num(n)) if !n.is_negative() => {
                let v = n.to_u64();
                self.pos += 1;
                v.ok_or(ParseError::Syntax { offset: self.offset(), message: "number too large".into() })
            }
            _ => self.syntax("expected natural number"),
        }
    }

    fn val_bound(&mut self, inf: &str) -> PResult<ValBound> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "inf" && inf == "inf" => {
                self.pos += 1;
                Ok(None)
            }
            Some(Tok::Num(n)) => {
                self.pos += 1;
                n.to_i64()
                    .map(Some)
                    .ok_or(ParseError::Syntax { offset: self.offset(), message: "bound too large".into() })
            }
            Some(Tok::Ident(s)) if s == "-inf" && inf == "-inf" => {
                self.pos += 1;
                Ok(None)
            }
            _ => self.syntax(format!("expected integer or `{inf}`")),
        }
    }

    fn term_list(&mut self) -> PResult<Vec<Term>> {
        let mut args = Vec::new();
        if self.is_sym(')') {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.is_sym(',') {
                self.pos += 1;
            } else {
                self.expect_sym(')')?;
                return Ok(args);
            }
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let mut acc = self.scaled()?;
        while self.is_sym('+') {
            let off = self.offset();
            self.require(Builtin::Arith, "+", off)?;
            self.pos += 1;
            let rhs = self.scaled()?;
            acc = Term::add(acc, rhs);
        }
        Ok(acc)
    }

    /// Tries `num` or `num/num` at the cursor without consuming on failure.
    fn rational_at(&self, k: usize) -> Option<(Rational, usize)> {
        let num = match self.peek_at(k) {
            Some(Tok::Num(n)) => n.clone(),
            _ => return None,
        };
        if self.peek_at(k + 1) == Some(&Tok::Sym('/')) {
            if let Some(Tok::Num(d)) = self.peek_at(k + 2) {
                if d.is_positive() {
                    return Some((Rational::new(num, d.clone()), 3));
                }
            }
            return None;
        }
        Some((Rational::from_integer(num), 1))
    }

    fn scaled(&mut self) -> PResult<Term> {
        if self.is_sym('(') {
            if let Some((q, used)) = self.rational_at(1) {
                let close = 1 + used;
                if self.peek_at(close) == Some(&Tok::Sym(')'))
                    && self.peek_at(close + 1) == Some(&Tok::Sym('*'))
                {
                    let off = self.offset();
                    self.require(Builtin::Arith, "scaling", off)?;
                    self.pos += close + 2;
                    let t = self.scaled()?;
                    return Ok(Term::scale(q, t));
                }
            }
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Term> {
        let mut t = self.primary()?;
        while self.is_sym('.') {
            let off = self.offset();
            match self.peek_at(1) {
                Some(Tok::Num(n)) if *n == BigInt::one() || *n == BigInt::from(2) => {
                    self.require(Builtin::Projection, "projection", off)?;
                    let i = n.to_u8().unwrap();
                    self.pos += 2;
                    t = Term::proj(i, t);
                }
                _ => break,
            }
        }
        Ok(t)
    }

    fn primary(&mut self) -> PResult<Term> {
        let off = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                if self.peek_at(1) == Some(&Tok::Sym('(')) {
                    let arity = match self.sig.functions.get(&name) {
                        Some(a) => *a,
                        None => return Err(ParseError::UnknownSymbol { offset: off, name }),
                    };
                    self.pos += 2;
                    let args = self.term_list()?;
                    if args.len() != arity {
                        return Err(ParseError::Arity {
                            offset: off,
                            name,
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    Ok(Term::App(name, args))
                } else if matches!(name.as_str(), "E" | "A" | "true" | "false" | "-inf") {
                    self.syntax(format!("`{name}` is reserved"))
                } else {
                    self.pos += 1;
                    Ok(Term::Var(name))
                }
            }
            Some(Tok::Num(_)) => {
                let (q, used) = match self.rational_at(0) {
                    Some(r) => r,
                    None => return self.syntax("malformed rational"),
                };
                self.pos += used;
                if q.is_zero() {
                    Ok(Term::Zero)
                } else {
                    self.require(Builtin::RationalLiterals, "rational literal", off)?;
                    Ok(Term::Const(Value::Rat(q)))
                }
            }
            Some(Tok::Sym('(')) => {
                if let Some((a, used_a)) = self.rational_at(1) {
                    if self.peek_at(1 + used_a) == Some(&Tok::Sym(',')) {
                        if let Some((b, used_b)) = self.rational_at(2 + used_a) {
                            if self.peek_at(2 + used_a + used_b) == Some(&Tok::Sym(')')) {
                                self.require(Builtin::PairLiterals, "pair literal", off)?;
                                self.pos += 3 + used_a + used_b;
                                return Ok(Term::Const(Value::Pair(a, b)));
                            }
                        }
                    }
                }
                self.pos += 1;
                let t = self.term()?;
                self.expect_sym(')')?;
                Ok(t)
            }
            _ => self.syntax("expected term"),
        }
    }
}

fn run<T>(text: &str, sig: &Signature, entry: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), sig };
    let out = entry(&mut p)?;
    if p.pos != p.toks.len() {
        return p.syntax("unexpected trailing input");
    }
    Ok(out)
}

/// Parses a formula, checking every symbol against `sig`.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    run(text, sig, |p| p.formula())
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    run(text, sig, |p| p.term())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn sig() -> Signature {
        Signature::everything()
    }

    #[test]
    fn scaled_sum_against_variable() {
        let f = parse("(1/2)*x + f(y) < z", &sig()).unwrap();
        let expected = Formula::lt(
            Term::add(
                Term::scale(rat(1, 2), Term::var("x")),
                Term::app("f", Term::var("y")),
            ),
            Term::var("z"),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn existential_free_variables() {
        let f = parse("E x. (y < x & x < z)", &sig()).unwrap();
        assert!(matches!(f, Formula::Exists(ref v, _) if v == "x"));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["y", "z"]);
    }

    #[test]
    fn truncated_input_reports_offset() {
        let err = parse("x <", &sig()).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 3, .. }), "{err:?}");
    }

    #[test]
    fn unknown_symbols_and_arity() {
        let err = parse("g(x) < y", &sig()).unwrap_err();
        assert!(matches!(err, ParseError::UnknownSymbol { ref name, .. } if name == "g"));
        let err = parse("f(x, y) < y", &sig()).unwrap_err();
        assert!(matches!(err, ParseError::Arity { expected: 1, found: 2, .. }));
        let dlo = Signature::new("dlo", &[Builtin::Order]);
        let err = parse("P(x)", &dlo).unwrap_err();
        assert!(matches!(err, ParseError::UnknownSymbol { .. }));
        let err = parse("x + y < z", &dlo).unwrap_err();
        assert!(matches!(err, ParseError::UnknownSymbol { .. }));
    }

    #[test]
    fn pair_literals_and_grouping() {
        let f = parse("E x. ((0,0) < x & x < (0,1))", &sig()).unwrap();
        let body = Formula::And(vec![
            Formula::lt(Term::Const(Value::Pair(rat(0, 1), rat(0, 1))), Term::var("x")),
            Formula::lt(Term::var("x"), Term::Const(Value::Pair(rat(0, 1), rat(1, 1)))),
        ]);
        assert_eq!(f, Formula::exists("x", body));
        let t = parse_term("f(x + (2)*y)", &sig()).unwrap();
        assert_eq!(
            t,
            Term::app("f", Term::add(Term::var("x"), Term::scale(rat(2, 1), Term::var("y"))))
        );
    }

    #[test]
    fn valued_field_atoms() {
        let f = parse("Ann(x + (-1)*y0, 2, -inf) & Pow(2, 1, x + (-1)*y0)", &sig()).unwrap();
        let printed = f.to_string();
        assert_eq!(printed, "Ann(x + (-1)*y0, 2, -inf) & Pow(2, 1, x + (-1)*y0)");
        assert_eq!(parse(&printed, &sig()).unwrap(), f);
        let g = parse("R2(x, y) | !P(x) | vle(x, y)", &sig()).unwrap();
        assert_eq!(parse(&g.to_string(), &sig()).unwrap(), g);
    }

    #[test]
    fn greater_than_is_sugar() {
        assert_eq!(parse("x > y", &sig()).unwrap(), parse("y < x", &sig()).unwrap());
    }

    #[test]
    fn projections() {
        let f = parse("a < x.1 & x.2 < b", &sig()).unwrap();
        assert_eq!(f.to_string(), "a < x.1 & x.2 < b");
    }
}
