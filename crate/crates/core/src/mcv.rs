//! Monotone circuit value strings and binary-search witnessing.

use std::collections::BTreeMap;

use crate::circuit::{circuit_from_table, AlgebraElement, Assignment, CircuitBuilder, TruthTable};
use crate::error::{Error, Result};
use crate::formula::{eval_standard, parse, BitString, Formula, FormulaClass, NumEnv, StrEnv};
use crate::limits::Limits;
use crate::translate::{bool_value, BString, CircuitFamily, TranslationEnv};

/// A monotone circuit with `a` gates whose types and wiring are
/// circuit-valued. Gate `x` is an AND when `C(x)`, an OR otherwise; the edge
/// `y → x` is present when `E(x·a + y)`.
#[derive(Clone, Debug)]
pub struct MCVInstance {
    pub a: usize,
    pub c: BString,
    pub e: BString,
}

impl MCVInstance {
    pub fn new(a: usize, c: BString, e: BString) -> Result<Self> {
        if a < 2 {
            return Err(Error::Invalid(format!(
                "an MCV instance needs at least 2 gates, got {a}"
            )));
        }
        if c.len() != a {
            return Err(Error::Length {
                what: "C".into(),
                expected: a,
                got: c.len(),
            });
        }
        if e.len() != a * a {
            return Err(Error::Length {
                what: "E".into(),
                expected: a * a,
                got: e.len(),
            });
        }
        if c.num_vars() != e.num_vars() {
            return Err(Error::Arity {
                expected: c.num_vars() as usize,
                got: e.num_vars() as usize,
            });
        }
        Ok(MCVInstance { a, c, e })
    }

    pub fn num_vars(&self) -> u32 {
        self.c.num_vars()
    }

    pub fn edge_index(&self, y: usize, x: usize) -> usize {
        x * self.a + y
    }

    /// The concrete instance at one assignment: gate types and edge flags.
    pub fn decode(&self, at: &Assignment) -> (Vec<bool>, Vec<bool>) {
        (
            self.c.entries().iter().map(|e| e.at(at)).collect(),
            self.e.entries().iter().map(|e| e.at(at)).collect(),
        )
    }

    fn args(&self, y: &BString) -> BTreeMap<String, BString> {
        [
            ("C".to_string(), self.c.clone()),
            ("E".to_string(), self.e.clone()),
            ("Y".to_string(), y.clone()),
        ]
        .into()
    }
}

/// Gate values of a concrete instance: gate 0 is 0, gate 1 is 1.
pub fn cvp_values(a: usize, c: &[bool], e: &[bool]) -> Vec<bool> {
    let mut v = vec![false; a];
    if a > 1 {
        v[1] = true;
    }
    for x in 2..a {
        let mut preds = (0..x).filter(|&y| e[x * a + y]).map(|y| v[y]);
        v[x] = if c[x] { preds.all(|b| b) } else { preds.any(|b| b) };
    }
    v
}

/// The gate-value string `Y`, built over one shared circuit arena.
pub fn build_mcv_y(inst: &MCVInstance) -> Result<BString> {
    let n = inst.num_vars();
    let a = inst.a;
    let mut b = CircuitBuilder::new(n, 0);
    let cs: Vec<_> = inst.c.entries().iter().map(|e| b.import(e.witness())).collect();
    let es: Vec<_> = inst.e.entries().iter().map(|e| b.import(e.witness())).collect();
    let mut nodes = vec![b.constant(false), b.constant(true)];
    let mut tables = vec![TruthTable::zero(n), TruthTable::one(n)];
    for (x, &cx) in cs.iter().enumerate().skip(2) {
        let c = &inst.c.entries()[x];
        let (mut all_node, mut any_node) = (b.constant(true), b.constant(false));
        let (mut all_t, mut any_t) = (TruthTable::one(n), TruthTable::zero(n));
        for y in 0..x {
            let idx = inst.edge_index(y, x);
            let et = inst.e.entries()[idx].table();
            let imp = b.imp_fold(es[idx], nodes[y]);
            all_node = b.and_fold(all_node, imp);
            all_t = all_t.and(&et.not().or(&tables[y])?)?;
            let both = b.and_fold(es[idx], nodes[y]);
            any_node = b.or_fold(any_node, both);
            any_t = any_t.or(&et.and(&tables[y])?)?;
        }
        let nc = b.not_fold(cx);
        let l = b.and_fold(cx, all_node);
        let r = b.and_fold(nc, any_node);
        nodes.push(b.or_fold(l, r));
        tables.push(c.table().and(&all_t)?.or(&c.table().not().and(&any_t)?)?);
    }
    let circuits = b.finish_many(&nodes[..a]);
    let entries = circuits
        .into_iter()
        .zip(tables)
        .map(|(w, t)| AlgebraElement::from_parts(t, w.widened(n, 0)))
        .collect();
    BString::new(n, entries)
}

const DELTA_MCV: &str = "!Y(0) & Y(1) & A x < a . (2 <= x -> (Y(x) <-> \
    ((C(x) & A y < x . (E(x*a+y) -> Y(y))) | (!C(x) & E y < x . (E(x*a+y) & Y(y))))))";

pub fn delta_mcv() -> Formula {
    parse(DELTA_MCV).expect("fixed formula parses")
}

/// `⟦δ_MCV(a, C, E, Y)⟧`.
pub fn check_delta_mcv(inst: &MCVInstance, y: &BString, limits: &Limits) -> Result<AlgebraElement> {
    if y.len() != inst.a {
        return Err(Error::Length {
            what: "Y".into(),
            expected: inst.a,
            got: y.len(),
        });
    }
    let args = inst.args(y);
    let env = TranslationEnv::for_args([("a".to_string(), inst.a as u64)].into(), &args)?;
    bool_value(&delta_mcv(), &env, &args, inst.num_vars(), limits)
}

/// `φ(x, X̄, Z)` with `ψ(x, X̄) ≡ ∃Z<t φ`. `x` is the value of the number
/// variable named `x_name`; `nums` supplies any other number parameters.
#[derive(Clone, Debug)]
pub struct WitnessProblem {
    pub matrix: Formula,
    pub x_name: String,
    pub x: u64,
    pub z: String,
    pub t: u64,
    pub nums: NumEnv,
}

impl WitnessProblem {
    pub fn new(matrix: Formula, z: &str, t: u64) -> Result<Self> {
        if matrix.classify() != FormulaClass::SigmaB0 {
            return Err(Error::NotSigmaB0(matrix.to_string()));
        }
        Ok(WitnessProblem {
            matrix,
            x_name: "x".into(),
            x: 0,
            z: z.into(),
            t,
            nums: NumEnv::new(),
        })
    }

    pub fn at(mut self, x: u64) -> Self {
        self.x = x;
        self
    }

    fn numbers(&self) -> NumEnv {
        let mut nums = self.nums.clone();
        nums.insert(self.x_name.clone(), self.x);
        nums
    }

    fn check_scale(&self, limits: &Limits) -> Result<()> {
        let max_len = self.t.saturating_sub(1);
        if max_len > limits.max_string_len {
            return Err(Error::Scale {
                what: "witness bound",
                value: max_len,
                max: limits.max_string_len,
            });
        }
        Ok(())
    }

    fn holds(&self, strs: &StrEnv, nums: &NumEnv, z: BitString, limits: &Limits) -> Result<bool> {
        let mut strs = strs.clone();
        strs.insert(self.z.clone(), z);
        eval_standard(&self.matrix, nums, &strs, limits)
    }

    /// All witnesses in search order: by length, then lexicographically on
    /// bits with bit 0 most significant.
    pub fn enumerate_witnesses(&self, strs: &StrEnv, limits: &Limits) -> Result<Vec<BitString>> {
        self.check_scale(limits)?;
        let nums = self.numbers();
        let mut out = Vec::new();
        for len in 0..self.t as usize {
            for z in strings_in_order(len) {
                if self.holds(strs, &nums, z.clone(), limits)? {
                    out.push(z);
                }
            }
        }
        Ok(out)
    }
}

/// Strings of one length in search order.
fn strings_in_order(len: usize) -> impl Iterator<Item = BitString> {
    (0..1u64 << len).map(move |v| BitString((0..len).map(|i| (v >> (len - 1 - i)) & 1 == 1).collect()))
}

/// The least witness, found by fixing one bit at a time and asking an
/// exhaustive oracle whether the remaining subtree holds a witness.
pub fn binary_search_witness(p: &WitnessProblem, strs: &StrEnv, limits: &Limits) -> Result<Option<BitString>> {
    p.check_scale(limits)?;
    let nums = p.numbers();
    let subtree = |prefix: &[bool], len: usize| -> Result<bool> {
        let free = len - prefix.len();
        for v in 0..1u64 << free {
            let mut bits = prefix.to_vec();
            bits.extend((0..free).map(|i| (v >> i) & 1 == 1));
            if p.holds(strs, &nums, BitString(bits), limits)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    for len in 0..p.t as usize {
        if !subtree(&[], len)? {
            continue;
        }
        let mut prefix = Vec::with_capacity(len);
        while prefix.len() < len {
            prefix.push(false);
            if !subtree(&prefix, len)? {
                *prefix.last_mut().unwrap() = true;
            }
        }
        return Ok(Some(BitString(prefix)));
    }
    Ok(None)
}

/// The witness function as `t` circuits over the layout of `env`: bits
/// `0..t-1` carry the least witness padded with zeros, bit `t-1` is set when
/// no witness exists.
pub fn witness_family(p: &WitnessProblem, env: &TranslationEnv, limits: &Limits) -> Result<CircuitFamily> {
    if p.t == 0 {
        return Err(Error::Invalid("witness bound must be at least 1".into()));
    }
    let b = env.num_vars();
    limits.check_vars(b)?;
    let t = p.t as usize;
    let mut outputs = vec![TruthTable::zero(b); t];
    for a in Assignment::all(b) {
        let strs = env.strings_from(a.bits());
        match binary_search_witness(p, &strs, limits)? {
            Some(z) => {
                for (i, &bit) in z.bits().iter().enumerate() {
                    outputs[i].set(a.index(), bit);
                }
            }
            None => outputs[t - 1].set(a.index(), true),
        }
    }
    CircuitFamily::new(b, outputs.iter().map(circuit_from_table).collect())
}

/// The comprehension element `Y(x)`: zero where the family signals no
/// witness, otherwise `⟦φ(x, X̄, Z_F)⟧` with `Z_F` read from the family.
pub fn comp_y_element(
    p: &WitnessProblem,
    env: &TranslationEnv,
    args: &BTreeMap<String, BString>,
    family: &CircuitFamily,
    n: u32,
    limits: &Limits,
) -> Result<AlgebraElement> {
    if p.matrix.mentions_length_of(&p.z) {
        return Err(Error::Invalid(format!(
            "the matrix may not mention |{}| since the witness is padded",
            p.z
        )));
    }
    if family.bound() as u64 != p.t {
        return Err(Error::Length {
            what: "witness family".into(),
            expected: p.t as usize,
            got: family.bound(),
        });
    }
    let out = family.apply(&env.flatten(args)?, n)?;
    let t = family.bound();
    let flag = out.entries()[t - 1].clone();
    let z = BString::new(n, out.entries()[..t - 1].to_vec())?;
    let mut zargs = args.clone();
    zargs.insert(p.z.clone(), z);
    let mut bounds = env.str_bounds.clone();
    bounds.insert(p.z.clone(), (t - 1) as u64);
    let zenv = TranslationEnv::new(p.numbers(), bounds)?;
    flag.complement()
        .meet(&bool_value(&p.matrix, &zenv, &zargs, n, limits)?)
}

/// The comprehension string `x ↦ Y(x)` for `x < a`.
pub fn comprehension_string(
    p: &WitnessProblem,
    a: u64,
    env: &TranslationEnv,
    args: &BTreeMap<String, BString>,
    n: u32,
    limits: &Limits,
) -> Result<BString> {
    let entries = (0..a)
        .map(|x| {
            let px = p.clone().at(x);
            let fam = witness_family(&px, env, limits)?;
            comp_y_element(&px, env, args, &fam, n, limits)
        })
        .collect::<Result<_>>()?;
    BString::new(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generic::{i_g, GenericFilter};

    fn constant_instance(a: usize, gates: &[(usize, bool, &[usize])]) -> MCVInstance {
        let mut c = vec![false; a];
        let mut e = vec![false; a * a];
        for &(x, is_and, preds) in gates {
            c[x] = is_and;
            for &y in preds {
                e[x * a + y] = true;
            }
        }
        MCVInstance::new(
            a,
            BString::constant(&BitString(c), 0),
            BString::constant(&BitString(e), 0),
        )
        .unwrap()
    }

    #[test]
    fn small_instances() {
        let inst = constant_instance(2, &[]);
        let y = build_mcv_y(&inst).unwrap();
        assert!(y.entries()[0].is_zero() && y.entries()[1].is_one());
        // gate 2 = OR(0, 1), gate 3 = AND(1, 2)
        let inst = constant_instance(4, &[(2, false, &[0, 1]), (3, true, &[1, 2])]);
        let y = build_mcv_y(&inst).unwrap();
        assert!(y.entries()[3].is_one());
        assert!(check_delta_mcv(&inst, &y, &Limits::default()).unwrap().is_one());
        let mut bad = y.entries().to_vec();
        bad[0] = AlgebraElement::one(0);
        let bad = BString::new(0, bad).unwrap();
        assert!(check_delta_mcv(&inst, &bad, &Limits::default()).unwrap().is_zero());
        assert!(MCVInstance::new(
            1,
            BString::constant(&BitString::zeros(1), 0),
            BString::constant(&BitString::zeros(1), 0)
        )
        .is_err());
    }

    #[test]
    fn variable_instance_matches_simulation() {
        let n = 3;
        let a = 4;
        let p = |k| AlgebraElement::var(k, n).unwrap();
        let zero = AlgebraElement::zero(n);
        let one = AlgebraElement::one(n);
        let c = BString::new(n, vec![zero.clone(), zero.clone(), p(0), p(1)]).unwrap();
        let mut e = vec![zero.clone(); a * a];
        e[2 * a] = p(2);
        e[2 * a + 1] = one.clone();
        e[3 * a + 1] = p(2).complement();
        e[3 * a + 2] = one;
        let inst = MCVInstance::new(a, c, BString::new(n, e).unwrap()).unwrap();
        let y = build_mcv_y(&inst).unwrap();
        assert!(check_delta_mcv(&inst, &y, &Limits::default()).unwrap().is_one());
        for g in GenericFilter::all(n) {
            let (cb, eb) = inst.decode(g.atom());
            assert_eq!(i_g(&y, &g).unwrap().bits(), cvp_values(a, &cb, &eb).as_slice());
            for (k, w) in y.entries().iter().enumerate() {
                assert_eq!(w.witness().eval(g.atom()).unwrap(), w.at(g.atom()), "entry {k}");
            }
        }
    }

    fn problem(m: &str, t: u64) -> WitnessProblem {
        WitnessProblem::new(parse(m).unwrap(), "Z", t).unwrap()
    }

    #[test]
    fn witness_examples() {
        let lim = Limits::default();
        let none = StrEnv::new();
        let w = binary_search_witness(&problem("Z(0)", 2), &none, &lim).unwrap();
        assert_eq!(w.unwrap().to_string(), "1");
        assert_eq!(
            binary_search_witness(&problem("Z(0) & !Z(0)", 4), &none, &lim).unwrap(),
            None
        );
        let strs: StrEnv = [("X".to_string(), "11".parse().unwrap())].into();
        let p = problem("|Z| = 2 & Z(0) & Z(1) & X(0) & X(1)", 3);
        assert_eq!(
            binary_search_witness(&p, &strs, &lim).unwrap().unwrap().to_string(),
            "11"
        );
        let p = problem("Z(1) | |Z| = 3", 4);
        assert_eq!(
            p.enumerate_witnesses(&none, &lim).unwrap().first(),
            binary_search_witness(&p, &none, &lim).unwrap().as_ref()
        );
        assert_eq!(
            binary_search_witness(&p, &none, &lim).unwrap().unwrap().to_string(),
            "01"
        );
    }

    #[test]
    fn comprehension_matches_realized_truth() {
        let lim = Limits::default();
        let n = 2;
        let args: BTreeMap<_, _> = [(
            "X".to_string(),
            BString::new(
                n,
                vec![AlgebraElement::var(0, n).unwrap(), AlgebraElement::var(1, n).unwrap()],
            )
            .unwrap(),
        )]
        .into();
        let env = TranslationEnv::for_args(NumEnv::new(), &args).unwrap();
        let p = problem("X(x) & Z(1) & !Z(0) | x = 1 & Z(0) & X(0)", 3);
        let y = comprehension_string(&p, 2, &env, &args, n, &lim).unwrap();
        for g in GenericFilter::all(n) {
            let strs = crate::generic::realize(&args, &g).unwrap().strings;
            for x in 0..2 {
                let exists = !p.clone().at(x).enumerate_witnesses(&strs, &lim).unwrap().is_empty();
                assert_eq!(g.contains(&y.entries()[x as usize]), exists);
            }
        }
        let fam = witness_family(&problem("Z(0) & !Z(0)", 2), &env, &lim).unwrap();
        let zero = comp_y_element(&problem("Z(0) & !Z(0)", 2), &env, &args, &fam, n, &lim).unwrap();
        assert!(zero.is_zero());
        assert!(comp_y_element(&problem("|Z| = 1", 2), &env, &args, &fam, n, &lim).is_err());
    }
}
