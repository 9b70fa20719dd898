//! Two-sort bounded-arithmetic formulas: syntax, parsing, classification and
//! evaluation in finite standard structures.

mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use eval::{eval_standard, eval_term, BitString, NumEnv, StrEnv};
pub use parse::{parse, parse_with_frees};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Zero,
    Num(u64),
    Var(String),
    Succ(Box<Term>),
    Plus(Box<Term>, Box<Term>),
    Times(Box<Term>, Box<Term>),
    /// `|X|`
    Len(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Eq(Term, Term),
    Leq(Term, Term),
    /// `X(t)`, i.e. `t ∈ X`.
    Member(String, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    ForallNum(String, Term, Box<Formula>),
    ExistsNum(String, Term, Box<Formula>),
    /// `∀X<t φ`, meaning `∀X(|X|<t → φ)`.
    ForallStr(String, Term, Box<Formula>),
    /// `∃X<t φ`, meaning `∃X(|X|<t ∧ φ)`.
    ExistsStr(String, Term, Box<Formula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormulaClass {
    SigmaB0,
    SigmaB1,
    Other,
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    fn collect_vars(&self, nums: &mut BTreeSet<String>, strs: &mut BTreeSet<String>) {
        match self {
            Term::Zero | Term::Num(_) => {}
            Term::Var(x) => {
                nums.insert(x.clone());
            }
            Term::Len(x) => {
                strs.insert(x.clone());
            }
            Term::Succ(t) => t.collect_vars(nums, strs),
            Term::Plus(a, b) | Term::Times(a, b) => {
                a.collect_vars(nums, strs);
                b.collect_vars(nums, strs);
            }
        }
    }

    /// Whether `|name|` occurs in the term.
    pub fn mentions_length_of(&self, name: &str) -> bool {
        match self {
            Term::Len(x) => x == name,
            Term::Succ(t) => t.mentions_length_of(name),
            Term::Plus(a, b) | Term::Times(a, b) => a.mentions_length_of(name) || b.mentions_length_of(name),
            _ => false,
        }
    }

    fn subst_num(&self, name: &str, value: &Term) -> Term {
        match self {
            Term::Var(x) if x == name => value.clone(),
            Term::Succ(t) => Term::Succ(Box::new(t.subst_num(name, value))),
            Term::Plus(a, b) => Term::Plus(Box::new(a.subst_num(name, value)), Box::new(b.subst_num(name, value))),
            Term::Times(a, b) => Term::Times(Box::new(a.subst_num(name, value)), Box::new(b.subst_num(name, value))),
            t => t.clone(),
        }
    }
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    /// Free number and string variables, in that order.
    pub fn free_vars(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut nums = BTreeSet::new();
        let mut strs = BTreeSet::new();
        self.free_into(&mut nums, &mut strs);
        (nums, strs)
    }

    pub fn free_num_vars(&self) -> BTreeSet<String> {
        self.free_vars().0
    }

    pub fn free_str_vars(&self) -> BTreeSet<String> {
        self.free_vars().1
    }

    fn free_into(&self, nums: &mut BTreeSet<String>, strs: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) | Formula::Leq(a, b) => {
                a.collect_vars(nums, strs);
                b.collect_vars(nums, strs);
            }
            Formula::Member(x, t) => {
                strs.insert(x.clone());
                t.collect_vars(nums, strs);
            }
            Formula::Not(f) => f.free_into(nums, strs),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.free_into(nums, strs);
                b.free_into(nums, strs);
            }
            Formula::ForallNum(x, t, body) | Formula::ExistsNum(x, t, body) => {
                t.collect_vars(nums, strs);
                let (mut n, s) = body.free_vars();
                n.remove(x);
                nums.extend(n);
                strs.extend(s);
            }
            Formula::ForallStr(x, t, body) | Formula::ExistsStr(x, t, body) => {
                t.collect_vars(nums, strs);
                let (n, mut s) = body.free_vars();
                s.remove(x);
                nums.extend(n);
                strs.extend(s);
            }
        }
    }

    /// Syntactic classification. String existentials must sit in positive and
    /// string universals in negative positions for `SigmaB1`.
    pub fn classify(&self) -> FormulaClass {
        fn walk(f: &Formula, positive: bool, seen_string_q: &mut bool) -> bool {
            match f {
                Formula::Eq(..) | Formula::Leq(..) | Formula::Member(..) => true,
                Formula::Not(g) => walk(g, !positive, seen_string_q),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    walk(a, positive, seen_string_q) & walk(b, positive, seen_string_q)
                }
                Formula::Imp(a, b) => walk(a, !positive, seen_string_q) & walk(b, positive, seen_string_q),
                Formula::ForallNum(_, _, body) | Formula::ExistsNum(_, _, body) => walk(body, positive, seen_string_q),
                Formula::ExistsStr(_, _, body) => {
                    *seen_string_q = true;
                    positive & walk(body, positive, seen_string_q)
                }
                Formula::ForallStr(_, _, body) => {
                    *seen_string_q = true;
                    !positive & walk(body, positive, seen_string_q)
                }
            }
        }
        let mut seen = false;
        let ok = walk(self, true, &mut seen);
        match (seen, ok) {
            (false, _) => FormulaClass::SigmaB0,
            (true, true) => FormulaClass::SigmaB1,
            (true, false) => FormulaClass::Other,
        }
    }

    /// Rewrites `φ → ψ` as `¬φ ∨ ψ` throughout.
    pub fn lower_implications(&self) -> Formula {
        let rec = |f: &Formula| Box::new(f.lower_implications());
        match self {
            Formula::Imp(a, b) => Formula::Or(Box::new(Formula::Not(rec(a))), rec(b)),
            Formula::Not(f) => Formula::Not(rec(f)),
            Formula::And(a, b) => Formula::And(rec(a), rec(b)),
            Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
            Formula::ForallNum(x, t, f) => Formula::ForallNum(x.clone(), t.clone(), rec(f)),
            Formula::ExistsNum(x, t, f) => Formula::ExistsNum(x.clone(), t.clone(), rec(f)),
            Formula::ForallStr(x, t, f) => Formula::ForallStr(x.clone(), t.clone(), rec(f)),
            Formula::ExistsStr(x, t, f) => Formula::ExistsStr(x.clone(), t.clone(), rec(f)),
            atom => atom.clone(),
        }
    }

    /// Whether `|name|` occurs anywhere, bound occurrences included.
    pub fn mentions_length_of(&self, name: &str) -> bool {
        match self {
            Formula::Eq(a, b) | Formula::Leq(a, b) => a.mentions_length_of(name) || b.mentions_length_of(name),
            Formula::Member(_, t) => t.mentions_length_of(name),
            Formula::Not(f) => f.mentions_length_of(name),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.mentions_length_of(name) || b.mentions_length_of(name)
            }
            Formula::ForallNum(_, t, f)
            | Formula::ExistsNum(_, t, f)
            | Formula::ForallStr(_, t, f)
            | Formula::ExistsStr(_, t, f) => t.mentions_length_of(name) || f.mentions_length_of(name),
        }
    }

    /// Substitutes a term for a free number variable. The caller guarantees the
    /// term's variables are not captured (numerals always qualify).
    pub fn subst_num(&self, name: &str, value: &Term) -> Formula {
        let rec = |f: &Formula| Box::new(f.subst_num(name, value));
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.subst_num(name, value), b.subst_num(name, value)),
            Formula::Leq(a, b) => Formula::Leq(a.subst_num(name, value), b.subst_num(name, value)),
            Formula::Member(x, t) => Formula::Member(x.clone(), t.subst_num(name, value)),
            Formula::Not(f) => Formula::Not(rec(f)),
            Formula::And(a, b) => Formula::And(rec(a), rec(b)),
            Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
            Formula::Imp(a, b) => Formula::Imp(rec(a), rec(b)),
            Formula::ForallNum(x, t, f) | Formula::ExistsNum(x, t, f) => {
                let t2 = t.subst_num(name, value);
                let body = if x == name { f.clone() } else { rec(f) };
                if matches!(self, Formula::ForallNum(..)) {
                    Formula::ForallNum(x.clone(), t2, body)
                } else {
                    Formula::ExistsNum(x.clone(), t2, body)
                }
            }
            Formula::ForallStr(x, t, f) => Formula::ForallStr(x.clone(), t.subst_num(name, value), rec(f)),
            Formula::ExistsStr(x, t, f) => Formula::ExistsStr(x.clone(), t.subst_num(name, value), rec(f)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::ForallNum(..) | Formula::ExistsNum(..) | Formula::ForallStr(..) | Formula::ExistsStr(..) => 0,
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(..) => 4,
            _ => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.precedence();
        let paren = p < min || (p == 0 && min > 0);
        if paren {
            write!(f, "(")?;
        }
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}")?,
            Formula::Leq(a, b) => write!(f, "{a} <= {b}")?,
            Formula::Member(x, t) => write!(f, "{x}({t})")?,
            Formula::Not(g) => {
                write!(f, "!")?;
                g.write_prec(f, 4)?;
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.write_prec(f, p)?;
                write!(f, " {} ", if p == 3 { "&" } else { "|" })?;
                b.write_prec(f, p + 1)?;
            }
            Formula::Imp(a, b) => {
                a.write_prec(f, 2)?;
                write!(f, " -> ")?;
                b.write_prec(f, 1)?;
            }
            Formula::ForallNum(x, t, body)
            | Formula::ExistsNum(x, t, body)
            | Formula::ForallStr(x, t, body)
            | Formula::ExistsStr(x, t, body) => {
                let q = if matches!(self, Formula::ForallNum(..) | Formula::ForallStr(..)) {
                    "A"
                } else {
                    "E"
                };
                write!(f, "{q} {x} < {t} . ")?;
                body.write_prec(f, 0)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // sums bind loosest; products and primaries need no parentheses on the left
        fn go(t: &Term, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
            match t {
                Term::Zero => write!(f, "0"),
                Term::Num(k) => write!(f, "{k}"),
                Term::Var(x) => write!(f, "{x}"),
                Term::Len(x) => write!(f, "|{x}|"),
                Term::Succ(a) => {
                    write!(f, "s(")?;
                    go(a, f, 0)?;
                    write!(f, ")")
                }
                Term::Plus(a, b) => {
                    if min > 0 {
                        write!(f, "(")?;
                    }
                    go(a, f, 0)?;
                    write!(f, " + ")?;
                    go(b, f, 1)?;
                    if min > 0 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Term::Times(a, b) => {
                    if min > 1 {
                        write!(f, "(")?;
                    }
                    go(a, f, 1)?;
                    write!(f, " * ")?;
                    go(b, f, 2)?;
                    if min > 1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, f, 0)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(s: &str) -> FormulaClass {
        parse(s).unwrap().classify()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(class("A x<3 . X(x)"), FormulaClass::SigmaB0);
        assert_eq!(class("E Z<4 . (Z(0) & A x<3 . X(x))"), FormulaClass::SigmaB1);
        // the existential sits in the antecedent, hence negatively
        assert_eq!(class("(E Z<3 . Z(0)) -> X(0)"), FormulaClass::Other);
        assert_eq!(class("!(A Z<2 . Z(0))"), FormulaClass::SigmaB1);
        assert_eq!(class("A Z<2 . Z(0)"), FormulaClass::Other);
        assert_eq!(class("!!(E Z<2 . Z(0))"), FormulaClass::SigmaB1);
        assert_eq!(class("(A Z<2 . Z(0)) -> X(0)"), FormulaClass::SigmaB1);
    }

    #[test]
    fn conjunction_preserves_sigma_b0() {
        let a = parse("A x < 2 . X(x)").unwrap();
        let b = parse("E y < |Y| . Y(y) & y = 1").unwrap();
        assert_eq!(Formula::and(a, b).classify(), FormulaClass::SigmaB0);
    }

    #[test]
    fn free_variables() {
        let f = parse("A x < |X| . (X(x) -> Y(x + c))").unwrap();
        let (n, s) = f.free_vars();
        assert_eq!(n.into_iter().collect::<Vec<_>>(), vec!["c"]);
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec!["X", "Y"]);
    }

    #[test]
    fn substitution_respects_binding() {
        let f = parse("X(x) & A x < 2 . Y(x)").unwrap();
        let g = f.subst_num("x", &Term::Num(5));
        assert_eq!(g.to_string(), "X(5) & (A x_1 < 2 . Y(x_1))");
    }

    #[test]
    fn printing_parenthesizes_quantifiers() {
        let f = parse("(A x < 2 . X(x)) & Y(0)").unwrap();
        assert_eq!(f.to_string(), "(A x < 2 . X(x)) & Y(0)");
        let f = parse("!(E x < 2 . X(x))").unwrap();
        assert_eq!(f.to_string(), "!(E x < 2 . X(x))");
        assert_eq!(
            parse("a * (b + c) = s(a) + b * c").unwrap().to_string(),
            "a * (b + c) = s(a) + b * c"
        );
    }
}
