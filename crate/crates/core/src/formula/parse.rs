//! Surface syntax.
//!
//! ```text
//! formula := quant | imp
//! quant   := ("A" | "E") ident "<" term "." formula
//! imp     := or (("->" imp) | ("<->" or))?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | quant | "(" formula ")" | STR "(" term ")" | term rel term
//! rel     := "=" | "!=" | "<=" | "<" | ">=" | ">"
//! term    := prod ("+" prod)*
//! prod    := prim ("*" prim)*
//! prim    := NAT | num | "s(" term ")" | "|" STR "|" | "(" term ")"
//! ```
//!
//! Identifiers starting with an uppercase letter are strings, all others are
//! numbers. A quantifier body extends as far right as possible.

use std::collections::{BTreeSet, HashMap};

use super::{Formula, Term};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Nat(u64),
    LParen,
    RParen,
    Bar,
    Amp,
    Bang,
    Arrow,
    Iff,
    Eq,
    Neq,
    Le,
    Lt,
    Ge,
    Gt,
    Plus,
    Star,
    Dot,
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: l0, col: c0 });
            *i += len;
            *col += len;
        };
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '|' => push(Tok::Bar, 1, &mut i, &mut col),
            '&' => push(Tok::Amp, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '!' if next == Some('=') => push(Tok::Neq, 2, &mut i, &mut col),
            '!' => push(Tok::Bang, 1, &mut i, &mut col),
            '-' if next == Some('>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '<' if next == Some('-') && chars.get(i + 2) == Some(&'>') => push(Tok::Iff, 3, &mut i, &mut col),
            '<' if next == Some('=') => push(Tok::Le, 2, &mut i, &mut col),
            '<' => push(Tok::Lt, 1, &mut i, &mut col),
            '>' if next == Some('=') => push(Tok::Ge, 2, &mut i, &mut col),
            '>' => push(Tok::Gt, 1, &mut i, &mut col),
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s.parse().map_err(|_| Error::Parse {
                    line: l0,
                    col: c0,
                    msg: format!("numeral {s} is too large"),
                })?;
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Nat(v),
                    line: l0,
                    col: c0,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: l0,
                    col: c0,
                });
            }
            other => {
                return Err(Error::Parse {
                    line: l0,
                    col: c0,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

fn is_string_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let t = &self.toks[self.pos];
        Error::Parse {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn at_quantifier(&self) -> bool {
        matches!(self.peek(), Tok::Ident(q) if q == "A" || q == "E") && matches!(self.peek_at(1), Tok::Ident(_))
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.at_quantifier() {
            return self.quantifier();
        }
        let lhs = self.or()?;
        match self.peek() {
            Tok::Arrow => {
                self.bump();
                let rhs = self.formula()?;
                Ok(Formula::imp(lhs, rhs))
            }
            Tok::Iff => {
                self.bump();
                let rhs = if self.at_quantifier() {
                    self.quantifier()?
                } else {
                    self.or()?
                };
                Ok(Formula::and(
                    Formula::imp(lhs.clone(), rhs.clone()),
                    Formula::imp(rhs, lhs),
                ))
            }
            _ => Ok(lhs),
        }
    }

    fn quantifier(&mut self) -> Result<Formula> {
        let universal = matches!(self.bump(), Tok::Ident(q) if q == "A");
        let Tok::Ident(var) = self.bump() else { unreachable!() };
        self.expect(Tok::Lt, "`<` after the quantified variable")?;
        let bound = self.term()?;
        self.expect(Tok::Dot, "`.` after the quantifier bound")?;
        let body = Box::new(self.formula()?);
        Ok(match (universal, is_string_name(&var)) {
            (true, false) => Formula::ForallNum(var, bound, body),
            (false, false) => Formula::ExistsNum(var, bound, body),
            (true, true) => Formula::ForallStr(var, bound, body),
            (false, true) => Formula::ExistsStr(var, bound, body),
        })
    }

    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let g = self.and()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let g = self.unary()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.at_quantifier() {
            return self.quantifier();
        }
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                let save = self.pos;
                if let Ok(f) = self.comparison() {
                    return Ok(f);
                }
                self.pos = save;
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(x) if is_string_name(&x) && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)` closing the membership")?;
                Ok(Formula::Member(x, t))
            }
            Tok::End => Err(self.err("unexpected end of input")),
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<Formula> {
        let a = self.term()?;
        let rel = self.bump();
        let b = self.term()?;
        Ok(match rel {
            Tok::Eq => Formula::Eq(a, b),
            Tok::Neq => Formula::not(Formula::Eq(a, b)),
            Tok::Le => Formula::Leq(a, b),
            Tok::Lt => Formula::Leq(Term::Succ(Box::new(a)), b),
            Tok::Ge => Formula::Leq(b, a),
            Tok::Gt => Formula::Leq(Term::Succ(Box::new(b)), a),
            _ => {
                self.pos -= 1;
                return Err(self.err("expected a comparison"));
            }
        })
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.product()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let u = self.product()?;
            t = Term::Plus(Box::new(t), Box::new(u));
        }
        Ok(t)
    }

    fn product(&mut self) -> Result<Term> {
        let mut t = self.term_primary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let u = self.term_primary()?;
            t = Term::Times(Box::new(t), Box::new(u));
        }
        Ok(t)
    }

    fn term_primary(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Nat(0) => {
                self.bump();
                Ok(Term::Zero)
            }
            Tok::Nat(k) => {
                self.bump();
                Ok(Term::Num(k))
            }
            Tok::Ident(s) if s == "s" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)` closing s(...)")?;
                Ok(Term::Succ(Box::new(t)))
            }
            Tok::Ident(x) if !is_string_name(&x) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    return Err(self.err(format!("number variable {x} cannot be applied")));
                }
                Ok(Term::Var(x))
            }
            Tok::Ident(x) => Err(self.err(format!("string variable {x} used as a number; write |{x}|"))),
            Tok::Bar => {
                self.bump();
                let Tok::Ident(x) = self.peek().clone() else {
                    return Err(self.err("expected a string variable after `|`"));
                };
                if !is_string_name(&x) {
                    return Err(self.err(format!("length applies to string variables only, found {x}")));
                }
                self.bump();
                self.expect(Tok::Bar, "`|` closing the length")?;
                Ok(Term::Len(x))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

fn names_in(f: &Formula, out: &mut BTreeSet<String>) {
    fn term(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::Var(x) | Term::Len(x) => {
                out.insert(x.clone());
            }
            Term::Succ(a) => term(a, out),
            Term::Plus(a, b) | Term::Times(a, b) => {
                term(a, out);
                term(b, out);
            }
            _ => {}
        }
    }
    match f {
        Formula::Eq(a, b) | Formula::Leq(a, b) => {
            term(a, out);
            term(b, out);
        }
        Formula::Member(x, t) => {
            out.insert(x.clone());
            term(t, out);
        }
        Formula::Not(g) => names_in(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            names_in(a, out);
            names_in(b, out);
        }
        Formula::ForallNum(x, t, g)
        | Formula::ExistsNum(x, t, g)
        | Formula::ForallStr(x, t, g)
        | Formula::ExistsStr(x, t, g) => {
            out.insert(x.clone());
            term(t, out);
            names_in(g, out);
        }
    }
}

struct Renamer {
    taken: BTreeSet<String>,
    frees: BTreeSet<String>,
}

impl Renamer {
    fn term(&self, t: &Term, env: &HashMap<String, String>) -> Term {
        let look = |x: &String| env.get(x).cloned().unwrap_or_else(|| x.clone());
        match t {
            Term::Var(x) => Term::Var(look(x)),
            Term::Len(x) => Term::Len(look(x)),
            Term::Succ(a) => Term::Succ(Box::new(self.term(a, env))),
            Term::Plus(a, b) => Term::Plus(Box::new(self.term(a, env)), Box::new(self.term(b, env))),
            Term::Times(a, b) => Term::Times(Box::new(self.term(a, env)), Box::new(self.term(b, env))),
            t => t.clone(),
        }
    }

    fn fresh(&mut self, base: &str) -> String {
        let stem = match base.rsplit_once('_') {
            Some((s, k)) if !s.is_empty() && k.chars().all(|c| c.is_ascii_digit()) && !k.is_empty() => s,
            _ => base,
        };
        let name = (1..)
            .map(|k| format!("{stem}_{k}"))
            .find(|c| !self.taken.contains(c))
            .unwrap();
        self.taken.insert(name.clone());
        name
    }

    fn formula(&mut self, f: &Formula, env: &HashMap<String, String>, active: &mut Vec<String>) -> Formula {
        match f {
            Formula::Eq(a, b) => Formula::Eq(self.term(a, env), self.term(b, env)),
            Formula::Leq(a, b) => Formula::Leq(self.term(a, env), self.term(b, env)),
            Formula::Member(x, t) => {
                Formula::Member(env.get(x).cloned().unwrap_or_else(|| x.clone()), self.term(t, env))
            }
            Formula::Not(g) => Formula::not(self.formula(g, env, active)),
            Formula::And(a, b) => Formula::and(self.formula(a, env, active), self.formula(b, env, active)),
            Formula::Or(a, b) => Formula::or(self.formula(a, env, active), self.formula(b, env, active)),
            Formula::Imp(a, b) => Formula::imp(self.formula(a, env, active), self.formula(b, env, active)),
            Formula::ForallNum(x, t, g)
            | Formula::ExistsNum(x, t, g)
            | Formula::ForallStr(x, t, g)
            | Formula::ExistsStr(x, t, g) => {
                let bound = self.term(t, env);
                let name = if self.frees.contains(x) || active.contains(x) {
                    self.fresh(x)
                } else {
                    x.clone()
                };
                let mut inner = env.clone();
                inner.insert(x.clone(), name.clone());
                active.push(name.clone());
                let body = Box::new(self.formula(g, &inner, active));
                active.pop();
                match f {
                    Formula::ForallNum(..) => Formula::ForallNum(name, bound, body),
                    Formula::ExistsNum(..) => Formula::ExistsNum(name, bound, body),
                    Formula::ForallStr(..) => Formula::ForallStr(name, bound, body),
                    _ => Formula::ExistsStr(name, bound, body),
                }
            }
        }
    }
}

/// Renames bound variables that clash with a free variable or an enclosing
/// binder.
pub(crate) fn resolve_scopes(f: &Formula) -> Formula {
    let mut taken = BTreeSet::new();
    names_in(f, &mut taken);
    let (n, s) = f.free_vars();
    let mut r = Renamer {
        taken,
        frees: n.into_iter().chain(s).collect(),
    };
    r.formula(f, &HashMap::new(), &mut Vec::new())
}

/// Parses a formula; every free variable is allowed.
pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(resolve_scopes(&f))
}

/// Parses a formula whose free variables must be among `allowed`.
pub fn parse_with_frees(text: &str, allowed: &[&str]) -> Result<Formula> {
    let f = parse(text)?;
    let (n, s) = f.free_vars();
    if let Some(x) = n.iter().chain(s.iter()).find(|x| !allowed.contains(&x.as_str())) {
        return Err(Error::Unbound(x.clone()));
    }
    Ok(f)
}
