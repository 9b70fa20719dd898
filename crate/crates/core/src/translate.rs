//! Propositional translation of Σ^B_0 formulas and Boolean values of formulas
//! over circuit-valued strings.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::circuit::{AlgebraElement, Circuit, CircuitBuilder, NodeId};
use crate::error::{Error, Result};
use crate::formula::{eval_term, BitString, Formula, FormulaClass, NumEnv, StrEnv};
use crate::limits::Limits;

/// Fixed parameters of a translation: number values, string lengths, and the
/// input variable assigned to each string bit. Strings are laid out in name
/// order, bit 0 first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TranslationEnv {
    pub num_values: NumEnv,
    pub str_bounds: BTreeMap<String, u64>,
    layout: BTreeMap<String, u32>,
    num_vars: u32,
}

impl TranslationEnv {
    pub fn new(num_values: NumEnv, str_bounds: BTreeMap<String, u64>) -> Result<Self> {
        let mut layout = BTreeMap::new();
        let mut next: u64 = 0;
        for (x, &b) in &str_bounds {
            layout.insert(x.clone(), next as u32);
            next += b;
            if next > u32::MAX as u64 {
                return Err(Error::Overflow);
            }
        }
        Ok(TranslationEnv {
            num_values,
            str_bounds,
            layout,
            num_vars: next as u32,
        })
    }

    /// Parses `X=3,Y=2,x=1`: uppercase names are string lengths, lowercase
    /// names are number values.
    pub fn parse_bounds(text: &str) -> Result<Self> {
        let mut nums = NumEnv::new();
        let mut strs = BTreeMap::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("expected name=value, found {item:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            let v: u64 = v
                .parse()
                .map_err(|_| Error::Invalid(format!("bad value {v:?} for {k}")))?;
            let first = k.chars().next().ok_or_else(|| Error::Invalid("empty name".into()))?;
            if !(first.is_ascii_alphabetic() || first == '_') {
                return Err(Error::Invalid(format!("bad name {k:?}")));
            }
            let dup = if first.is_ascii_uppercase() {
                strs.insert(k.to_string(), v).is_some()
            } else {
                nums.insert(k.to_string(), v).is_some()
            };
            if dup {
                return Err(Error::Invalid(format!("{k} given twice")));
            }
        }
        Self::new(nums, strs)
    }

    /// Bounds taken from the lengths of the given strings.
    pub fn for_args(num_values: NumEnv, args: &BTreeMap<String, BString>) -> Result<Self> {
        Self::new(
            num_values,
            args.iter().map(|(k, v)| (k.clone(), v.len() as u64)).collect(),
        )
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Input variable of bit `i` of string `x`, if `i` is below its bound.
    pub fn var_of(&self, x: &str, i: u64) -> Result<Option<u32>> {
        let base = *self.layout.get(x).ok_or_else(|| Error::Unbound(x.to_string()))?;
        Ok((i < self.str_bounds[x]).then(|| base + i as u32))
    }

    /// Inverse of the layout: `(string, bit)` for an input variable.
    pub fn name_of(&self, var: u32) -> Option<(&str, u64)> {
        self.layout
            .iter()
            .rev()
            .find(|(_, &base)| base <= var)
            .filter(|(x, &base)| ((var - base) as u64) < self.str_bounds[*x])
            .map(|(x, &base)| (x.as_str(), (var - base) as u64))
    }

    /// The standard string valuation read from an assignment to the layout.
    pub fn strings_from(&self, bits: &[bool]) -> StrEnv {
        self.layout
            .iter()
            .map(|(x, &base)| {
                let len = self.str_bounds[x] as usize;
                (x.clone(), BitString(bits[base as usize..base as usize + len].to_vec()))
            })
            .collect()
    }

    /// Each string bit as its own layout variable, so that `realize` at the
    /// atom `A` yields `strings_from(A)`.
    pub fn generic_args(&self) -> Result<BTreeMap<String, BString>> {
        let n = self.num_vars;
        self.layout
            .iter()
            .map(|(x, &base)| {
                let entries = (0..self.str_bounds[x] as u32)
                    .map(|i| AlgebraElement::var(base + i, n))
                    .collect::<Result<_>>()?;
                Ok((x.clone(), BString::new(n, entries)?))
            })
            .collect()
    }

    /// Entries of `args` flattened in layout order.
    pub fn flatten(&self, args: &BTreeMap<String, BString>) -> Result<Vec<AlgebraElement>> {
        let mut out = Vec::with_capacity(self.num_vars as usize);
        for (x, &b) in &self.str_bounds {
            let s = args.get(x).ok_or_else(|| Error::Unbound(x.clone()))?;
            if s.len() as u64 != b {
                return Err(Error::Length {
                    what: x.clone(),
                    expected: b as usize,
                    got: s.len(),
                });
            }
            out.extend(s.entries().iter().cloned());
        }
        Ok(out)
    }
}

impl fmt::Display for TranslationEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .str_bounds
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .chain(self.num_values.iter().map(|(k, v)| format!("{k}={v}")))
            .collect();
        write!(f, "{}", items.join(","))
    }
}

/// A circuit-valued string `X : a → 𝔹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BString {
    n: u32,
    entries: Vec<AlgebraElement>,
}

impl BString {
    pub fn new(n: u32, entries: Vec<AlgebraElement>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| e.num_vars() != n) {
            return Err(Error::Arity {
                expected: n as usize,
                got: e.num_vars() as usize,
            });
        }
        Ok(BString { n, entries })
    }

    /// The string with constant entries.
    pub fn constant(bits: &BitString, n: u32) -> Self {
        BString {
            n,
            entries: bits.bits().iter().map(|&b| AlgebraElement::constant(b, n)).collect(),
        }
    }

    pub fn from_circuits(circuits: &[Circuit], n: u32) -> Result<Self> {
        let entries = circuits
            .iter()
            .map(|c| AlgebraElement::from_circuit(c.clone(), n))
            .collect::<Result<_>>()?;
        Ok(BString { n, entries })
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[AlgebraElement] {
        &self.entries
    }

    /// Entry `i`, or the zero element past the end.
    pub fn get(&self, i: usize) -> AlgebraElement {
        self.entries
            .get(i)
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(self.n))
    }
}

/// A function given by one circuit per output bit over a shared input layout.
#[derive(Clone, Debug)]
pub struct CircuitFamily {
    num_inputs: u32,
    circuits: Vec<Circuit>,
}

impl CircuitFamily {
    pub fn new(num_inputs: u32, circuits: Vec<Circuit>) -> Result<Self> {
        if circuits.is_empty() {
            return Err(Error::Invalid("a circuit family needs at least one circuit".into()));
        }
        if let Some(c) = circuits
            .iter()
            .find(|c| c.num_inputs() > num_inputs || c.num_rand() > 0)
        {
            return Err(Error::Arity {
                expected: num_inputs as usize,
                got: c.num_inputs() as usize,
            });
        }
        let circuits = circuits.into_iter().map(|c| c.widened(num_inputs, 0)).collect();
        Ok(CircuitFamily { num_inputs, circuits })
    }

    pub fn num_inputs(&self) -> u32 {
        self.num_inputs
    }

    /// The output length `t`.
    pub fn bound(&self) -> usize {
        self.circuits.len()
    }

    pub fn circuits(&self) -> &[Circuit] {
        &self.circuits
    }

    /// The outputs on a concrete input.
    pub fn eval(&self, input: &[bool]) -> Vec<bool> {
        self.circuits.iter().map(|c| c.eval_with(input, &[])).collect()
    }

    /// The outputs on circuit-valued inputs.
    pub fn apply(&self, inputs: &[AlgebraElement], n: u32) -> Result<BString> {
        if inputs.len() != self.num_inputs as usize {
            return Err(Error::Arity {
                expected: self.num_inputs as usize,
                got: inputs.len(),
            });
        }
        let entries = self
            .circuits
            .iter()
            .map(|c| AlgebraElement::substitute(c, inputs, n))
            .collect::<Result<_>>()?;
        BString::new(n, entries)
    }
}

struct Translator<'a> {
    env: &'a TranslationEnv,
    lengths: StrEnv,
    nums: NumEnv,
    b: &'a mut CircuitBuilder,
    steps: u64,
    budget: u64,
}

impl Translator<'_> {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::Budget { budget: self.budget });
        }
        Ok(())
    }

    fn go(&mut self, f: &Formula) -> Result<NodeId> {
        self.tick()?;
        match f {
            Formula::Eq(a, b) => {
                let v = eval_term(a, &self.nums, &self.lengths)? == eval_term(b, &self.nums, &self.lengths)?;
                Ok(self.b.constant(v))
            }
            Formula::Leq(a, b) => {
                let v = eval_term(a, &self.nums, &self.lengths)? <= eval_term(b, &self.nums, &self.lengths)?;
                Ok(self.b.constant(v))
            }
            Formula::Member(x, t) => {
                let i = eval_term(t, &self.nums, &self.lengths)?;
                Ok(match self.env.var_of(x, i)? {
                    Some(v) => self.b.var(v),
                    None => self.b.constant(false),
                })
            }
            Formula::Not(g) => {
                let x = self.go(g)?;
                Ok(self.b.not_fold(x))
            }
            Formula::And(g, h) => {
                let x = self.go(g)?;
                let y = self.go(h)?;
                Ok(self.b.and_fold(x, y))
            }
            Formula::Or(g, h) => {
                let x = self.go(g)?;
                let y = self.go(h)?;
                Ok(self.b.or_fold(x, y))
            }
            Formula::Imp(g, h) => {
                let x = self.go(g)?;
                let nx = self.b.not_fold(x);
                let y = self.go(h)?;
                Ok(self.b.or_fold(nx, y))
            }
            Formula::ForallNum(x, t, g) | Formula::ExistsNum(x, t, g) => {
                let bound = eval_term(t, &self.nums, &self.lengths)?;
                let universal = matches!(f, Formula::ForallNum(..));
                let saved = self.nums.remove(x);
                let mut acc = self.b.constant(universal);
                let mut result = Ok(());
                for v in 0..bound {
                    self.nums.insert(x.clone(), v);
                    match self.go(g) {
                        Ok(y) => {
                            acc = if universal {
                                self.b.and_fold(acc, y)
                            } else {
                                self.b.or_fold(acc, y)
                            };
                        }
                        Err(e) => {
                            result = Err(e);
                            break;
                        }
                    }
                }
                match saved {
                    Some(v) => self.nums.insert(x.clone(), v),
                    None => self.nums.remove(x),
                };
                result.map(|_| acc)
            }
            Formula::ForallStr(..) | Formula::ExistsStr(..) => Err(Error::NotSigmaB0(f.to_string())),
        }
    }
}

fn check_covered(f: &Formula, env: &TranslationEnv) -> Result<()> {
    if f.classify() != FormulaClass::SigmaB0 {
        return Err(Error::NotSigmaB0(f.to_string()));
    }
    let (nums, strs) = f.free_vars();
    if let Some(x) = nums.iter().find(|x| !env.num_values.contains_key(*x)) {
        return Err(Error::Unbound(x.clone()));
    }
    if let Some(x) = strs.iter().find(|x| !env.str_bounds.contains_key(*x)) {
        return Err(Error::Unbound(x.clone()));
    }
    Ok(())
}

/// Translates into an existing builder whose inputs follow `env`'s layout.
pub fn translate_into(b: &mut CircuitBuilder, f: &Formula, env: &TranslationEnv, limits: &Limits) -> Result<NodeId> {
    check_covered(f, env)?;
    let lengths = env
        .str_bounds
        .iter()
        .map(|(k, &v)| (k.clone(), BitString::zeros(v as usize)))
        .collect();
    let mut t = Translator {
        env,
        lengths,
        nums: env.num_values.clone(),
        b,
        steps: 0,
        budget: limits.max_expansion,
    };
    t.go(f)
}

/// The propositional translation `⟦φ⟧_{ā,b̄}` over `env.num_vars()` inputs.
pub fn translate_sigma_b0(f: &Formula, env: &TranslationEnv, limits: &Limits) -> Result<Circuit> {
    let n = env.num_vars();
    let mut b = CircuitBuilder::new(n, 0);
    let out = translate_into(&mut b, f, env, limits)?;
    Ok(b.finish(out).widened(n, 0))
}

/// `⟦φ(ā, X̄)⟧` for circuit-valued strings over `n` variables.
pub fn bool_value(
    f: &Formula,
    env: &TranslationEnv,
    args: &BTreeMap<String, BString>,
    n: u32,
    limits: &Limits,
) -> Result<AlgebraElement> {
    if let Some(s) = args.values().find(|s| s.num_vars() != n) {
        return Err(Error::Arity {
            expected: n as usize,
            got: s.num_vars() as usize,
        });
    }
    let entries = env.flatten(args)?;
    let c = translate_sigma_b0(f, env, limits)?;
    AlgebraElement::substitute(&c, &entries, n)
}

/// `⟦F(X̄) = Z⟧`: the meet of `C_i(X̄) ↔ Z(i)` when `|Z|` is the family's
/// output length, zero otherwise.
pub fn bv_pv_equals(family: &CircuitFamily, inputs: &[AlgebraElement], z: &BString) -> Result<AlgebraElement> {
    let n = z.num_vars();
    if z.len() != family.bound() {
        return Ok(AlgebraElement::zero(n));
    }
    let out = family.apply(inputs, n)?;
    let mut acc = AlgebraElement::one(n);
    for (c, zi) in out.entries().iter().zip(z.entries()) {
        acc = acc.meet(&c.iff(zi)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Assignment, Gate, TruthTable};
    use crate::formula::{eval_standard, parse};

    fn env(bounds: &str) -> TranslationEnv {
        TranslationEnv::parse_bounds(bounds).unwrap()
    }

    fn tr(f: &str, bounds: &str) -> Circuit {
        translate_sigma_b0(&parse(f).unwrap(), &env(bounds), &Limits::default()).unwrap()
    }

    #[test]
    fn translation_examples() {
        let c = tr("X(0)&X(1)", "X=2");
        assert_eq!(c.to_string(), "(p0 & p1)");
        let c = tr("E x<3 . X(x)", "X=3");
        assert_eq!(c.truth_table(3).unwrap().to_string(), "01111111");
        assert!(matches!(c.output_gate(), Gate::Or(..)));
        let c = tr("2+2=4", "");
        assert!(matches!(c.output_gate(), Gate::Const(true)));
        let c = tr("X(5)", "X=2");
        assert!(matches!(c.output_gate(), Gate::Const(false)));
        let c = tr("A i < |X| . X(i) -> Y(i)", "X=2,Y=3");
        assert_eq!(c.num_inputs(), 5);
    }

    #[test]
    fn translation_rejects_string_quantifiers() {
        let f = parse("E Z<2 . Z(0)").unwrap();
        assert!(matches!(
            translate_sigma_b0(&f, &env(""), &Limits::default()),
            Err(Error::NotSigmaB0(_))
        ));
        let f = parse("X(y)").unwrap();
        assert!(matches!(
            translate_sigma_b0(&f, &env("X=2"), &Limits::default()),
            Err(Error::Unbound(_))
        ));
    }

    #[test]
    fn translation_matches_standard_evaluation() {
        let cases = [
            ("A i < |X| . (X(i) -> Y(i + 1))", "X=3,Y=4"),
            ("E i < k . X(i) & !Y(i) | |X| = k", "X=3,Y=3,k=2"),
            ("A i < 3 . A j < 3 . (i < j -> (X(i) -> X(j)))", "X=3"),
        ];
        for (text, bounds) in cases {
            let f = parse(text).unwrap();
            let e = env(bounds);
            let c = translate_sigma_b0(&f, &e, &Limits::default()).unwrap();
            for a in Assignment::all(e.num_vars()) {
                let strs = e.strings_from(a.bits());
                let want = eval_standard(&f, &e.num_values, &strs, &Limits::default()).unwrap();
                assert_eq!(c.eval(&a).unwrap(), want, "{text} at {a}");
            }
        }
    }

    #[test]
    fn layout_round_trip() {
        let e = env("Y=2,X=3,k=4");
        assert_eq!(e.num_vars(), 5);
        assert_eq!(e.var_of("X", 2).unwrap(), Some(2));
        assert_eq!(e.var_of("Y", 0).unwrap(), Some(3));
        assert_eq!(e.var_of("Y", 2).unwrap(), None);
        for v in 0..5 {
            let (x, i) = e.name_of(v).unwrap();
            assert_eq!(e.var_of(x, i).unwrap(), Some(v));
        }
        assert_eq!(e.to_string(), "X=3,Y=2,k=4");
        assert!(TranslationEnv::parse_bounds("X=a").is_err());
        assert!(TranslationEnv::parse_bounds("X=1,X=2").is_err());
    }

    fn p(k: u32, n: u32) -> AlgebraElement {
        AlgebraElement::var(k, n).unwrap()
    }

    #[test]
    fn boolean_value_examples() {
        let lim = Limits::default();
        let x = p(0, 2);
        let args: BTreeMap<_, _> = [("X".to_string(), BString::new(2, vec![x.clone()]).unwrap())].into();
        let e = TranslationEnv::for_args(NumEnv::new(), &args).unwrap();
        assert_eq!(bool_value(&parse("X(0)").unwrap(), &e, &args, 2, &lim).unwrap(), x);
        assert!(bool_value(&parse("X(0) & !X(0)").unwrap(), &e, &args, 2, &lim)
            .unwrap()
            .is_zero());

        let args: BTreeMap<_, _> = [("X".to_string(), BString::new(2, vec![p(0, 2), p(1, 2)]).unwrap())].into();
        let e = TranslationEnv::for_args(NumEnv::new(), &args).unwrap();
        let v = bool_value(&parse("A x<2 . X(x)").unwrap(), &e, &args, 2, &lim).unwrap();
        assert_eq!(v.table(), &TruthTable::from_bit_str("0001").unwrap());

        let bad = env("X=3");
        assert!(matches!(
            bool_value(&parse("X(0)").unwrap(), &bad, &args, 2, &lim),
            Err(Error::Length { .. })
        ));
    }

    #[test]
    fn pv_equality() {
        let n = 2;
        let x = BString::new(n, vec![p(0, n), p(1, n)]).unwrap();
        let id = CircuitFamily::new(2, vec![Circuit::var(0, 2), Circuit::var(1, 2)]).unwrap();
        assert!(bv_pv_equals(&id, x.entries(), &x).unwrap().is_one());
        let short = BString::new(n, vec![p(0, n)]).unwrap();
        assert!(bv_pv_equals(&id, x.entries(), &short).unwrap().is_zero());

        let mut b = CircuitBuilder::new(2, 0);
        let (v0, v1) = (b.var(0), b.var(1));
        let (n0, n1) = (b.not(v0), b.not(v1));
        let neg = CircuitFamily::new(2, vec![b.finish(n0), b.finish(n1)]).unwrap();
        let z = BString::new(n, vec![p(0, n).complement(), p(1, n).complement()]).unwrap();
        assert!(bv_pv_equals(&neg, x.entries(), &z).unwrap().is_one());
        assert!(!bv_pv_equals(&neg, x.entries(), &x).unwrap().is_one());
    }
}
