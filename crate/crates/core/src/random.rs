//! Randomized circuits, threshold evaluation by exact counting, and the
//! dual weak pigeonhole experiments.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{tabulate, AlgebraElement, Assignment, Circuit, CircuitBuilder, Gate, Leaf, NodeId, TruthTable};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::translate::CircuitFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TriBool {
    Zero,
    One,
    Undefined,
}

impl TriBool {
    pub fn to_bool(self) -> Option<bool> {
        match self {
            TriBool::Zero => Some(false),
            TriBool::One => Some(true),
            TriBool::Undefined => None,
        }
    }

    /// Threshold reading of `count` successes out of `2^m`.
    pub fn from_count(count: u64, m: u32) -> TriBool {
        let total = 1u128 << m;
        let c = count as u128;
        if 4 * c >= 3 * total {
            TriBool::One
        } else if 4 * c <= total {
            TriBool::Zero
        } else {
            TriBool::Undefined
        }
    }
}

impl fmt::Display for TriBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriBool::Zero => "0",
            TriBool::One => "1",
            TriBool::Undefined => "undefined",
        })
    }
}

/// A plain outer circuit over `p_0..p_{n-1}` and block results `e_0..e_{k-1}`
/// (read as inputs `p_n..p_{n+k-1}`), where every block `R z C_i(p, z)` draws
/// from the same `m` random variables.
#[derive(Clone, Debug)]
pub struct RandCircuit {
    n: u32,
    m: u32,
    outer: Circuit,
    blocks: Vec<Circuit>,
}

impl RandCircuit {
    pub fn plain(c: Circuit, n: u32) -> Result<Self> {
        RandCircuit::composite(c, vec![], n, 0)
    }

    /// The single block `R z C`.
    pub fn block(c: Circuit, n: u32, m: u32) -> Result<Self> {
        RandCircuit::composite(Circuit::var(n, n + 1), vec![c], n, m)
    }

    pub fn composite(outer: Circuit, blocks: Vec<Circuit>, n: u32, m: u32) -> Result<Self> {
        let k = blocks.len() as u32;
        if let Some(&z) = outer.random_support().iter().next() {
            return Err(Error::RandomVariable(z));
        }
        let outer = outer.with_inputs(n + k)?;
        let mut bs = Vec::with_capacity(blocks.len());
        for c in blocks {
            if let Some(&z) = c.random_support().iter().next_back().filter(|&&z| z >= m) {
                return Err(Error::Arity {
                    expected: m as usize,
                    got: z as usize + 1,
                });
            }
            let c = c.with_inputs(n)?;
            bs.push(c.widened(n, m));
        }
        Ok(RandCircuit {
            n,
            m,
            outer,
            blocks: bs,
        })
    }

    /// Reads a circuit with random variables as one block, and one without as
    /// a plain circuit.
    pub fn from_circuit(c: Circuit) -> Result<Self> {
        let n = c.num_inputs();
        if c.random_support().is_empty() {
            RandCircuit::plain(c, n)
        } else {
            let m = c.num_rand();
            RandCircuit::block(c, n, m)
        }
    }

    pub fn num_inputs(&self) -> u32 {
        self.n
    }

    pub fn num_rand(&self) -> u32 {
        self.m
    }

    pub fn outer(&self) -> &Circuit {
        &self.outer
    }

    pub fn blocks(&self) -> &[Circuit] {
        &self.blocks
    }

    /// The same circuit with `m2 ≥ m` random variables; extra ones are unused.
    pub fn with_rand(&self, m2: u32) -> Self {
        let m = self.m.max(m2);
        RandCircuit {
            n: self.n,
            m,
            outer: self.outer.clone(),
            blocks: self.blocks.iter().map(|c| c.widened(self.n, m)).collect(),
        }
    }

    fn combine(&self, other: &RandCircuit, op: impl Fn(&mut CircuitBuilder, NodeId, NodeId) -> NodeId) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Arity {
                expected: self.n as usize,
                got: other.n as usize,
            });
        }
        let m = self.m.max(other.m);
        let (n, k) = (self.n, self.blocks.len() as u32);
        let mut b = CircuitBuilder::new(n + k + other.blocks.len() as u32, 0);
        let x = b.import(&self.outer);
        let y = b.import_with(&other.outer, |b, g| match g {
            Gate::Var(v) if v >= n => b.var(v + k),
            g => b.intern(g),
        });
        let out = op(&mut b, x, y);
        let blocks = self.blocks.iter().chain(&other.blocks).cloned().collect();
        RandCircuit::composite(b.finish(out), blocks, n, m)
    }

    pub fn and(&self, other: &RandCircuit) -> Result<Self> {
        self.combine(other, CircuitBuilder::and)
    }

    pub fn or(&self, other: &RandCircuit) -> Result<Self> {
        self.combine(other, CircuitBuilder::or)
    }

    pub fn not(&self) -> Self {
        let mut b = CircuitBuilder::new(self.outer.num_inputs(), 0);
        let x = b.import(&self.outer);
        let out = b.not(x);
        RandCircuit {
            outer: b.finish(out),
            ..self.clone()
        }
    }
}

fn check_budget(m: u32, blocks: usize, limits: &Limits) -> Result<()> {
    let work = (blocks as u128).saturating_mul(1u128 << m.min(100));
    if m > 62 || work > limits.max_expansion as u128 {
        return Err(Error::Budget {
            budget: limits.max_expansion,
        });
    }
    Ok(())
}

/// `|{Z ∈ 2^m : C(A, Z) = 1}|` for one block.
pub fn block_count(c: &Circuit, a: &[bool], m: u32) -> Result<u64> {
    let t = tabulate(c, m, |g| match g {
        Gate::Var(k) => Ok(Leaf::Fixed(a.get(k as usize).copied().unwrap_or(false))),
        Gate::RVar(k) => Ok(Leaf::Var(k)),
        _ => unreachable!(),
    })?;
    Ok(t.count_ones())
}

/// The block values at `a`, each read through the thresholds.
pub fn block_values(c: &RandCircuit, a: &Assignment, limits: &Limits) -> Result<Vec<(u64, TriBool)>> {
    if a.len() != c.n as usize {
        return Err(Error::Arity {
            expected: c.n as usize,
            got: a.len(),
        });
    }
    check_budget(c.m, c.blocks.len(), limits)?;
    c.blocks
        .iter()
        .map(|b| {
            let count = block_count(b, a.bits(), c.m)?;
            Ok((count, TriBool::from_count(count, c.m)))
        })
        .collect()
}

/// Threshold evaluation: blocks first, then the outer circuit on their bits.
/// Any undefined block makes the result undefined.
#[allow(non_snake_case)]
pub fn eval_R(c: &RandCircuit, a: &Assignment, limits: &Limits) -> Result<TriBool> {
    let vals = block_values(c, a, limits)?;
    let mut inputs = a.bits().to_vec();
    for (_, v) in vals {
        match v.to_bool() {
            Some(bit) => inputs.push(bit),
            None => return Ok(TriBool::Undefined),
        }
    }
    Ok(if c.outer.eval_with(&inputs, &[]) {
        TriBool::One
    } else {
        TriBool::Zero
    })
}

/// The table of `eval_R` over all of `2^n`, or the first gap assignment.
pub fn resolve(c: &RandCircuit, limits: &Limits) -> Result<TruthTable> {
    limits.check_vars(c.n)?;
    let n = c.n;
    let vals: Vec<TriBool> = (0..1usize << n)
        .into_par_iter()
        .map(|i| eval_R(c, &Assignment::from_index(i, n), limits))
        .collect::<Result<_>>()?;
    if let Some(i) = vals.iter().position(|v| *v == TriBool::Undefined) {
        return Err(Error::Unresolved(Assignment::from_index(i, n).to_string()));
    }
    Ok(TruthTable::from_fn(n, |i| vals[i] == TriBool::One))
}

/// Pointwise `eval_R(A, c) ≤ eval_R(A, c2)` over all of `2^n`.
#[allow(non_snake_case)]
pub fn leq_R(c: &RandCircuit, c2: &RandCircuit, n: u32, limits: &Limits) -> Result<bool> {
    for x in [c, c2] {
        if x.n != n {
            return Err(Error::Arity {
                expected: n as usize,
                got: x.n as usize,
            });
        }
    }
    resolve(c, limits)?.leq(&resolve(c2, limits)?)
}

/// An element of the resolved fragment, keyed by its table.
#[derive(Clone, Debug)]
pub struct RandElement {
    table: TruthTable,
    circuit: RandCircuit,
}

impl PartialEq for RandElement {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl Eq for RandElement {}

impl RandElement {
    pub fn new(circuit: RandCircuit, limits: &Limits) -> Result<Self> {
        let table = resolve(&circuit, limits)?;
        Ok(RandElement { table, circuit })
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    pub fn circuit(&self) -> &RandCircuit {
        &self.circuit
    }

    pub fn to_algebra(&self) -> AlgebraElement {
        AlgebraElement::from_table(self.table.clone())
    }

    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.table.leq(&other.table)
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        Ok(RandElement {
            table: self.table.and(&other.table)?,
            circuit: self.circuit.and(&other.circuit)?,
        })
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        Ok(RandElement {
            table: self.table.or(&other.table)?,
            circuit: self.circuit.or(&other.circuit)?,
        })
    }

    pub fn complement(&self) -> Self {
        RandElement {
            table: self.table.not(),
            circuit: self.circuit.not(),
        }
    }
}

/// `F : 2^a → 2^{2a}` given by `2a` circuits over `a` inputs.
#[derive(Clone, Debug)]
pub struct DwphpInstance {
    a: u32,
    family: CircuitFamily,
}

impl DwphpInstance {
    pub fn new(a: u32, family: CircuitFamily) -> Result<Self> {
        if a < 2 {
            return Err(Error::Invalid(format!("a must be at least 2, got {a}")));
        }
        if family.num_inputs() != a || family.bound() != 2 * a as usize {
            return Err(Error::Length {
                what: "dWPHP family".into(),
                expected: 2 * a as usize,
                got: family.bound(),
            });
        }
        Ok(DwphpInstance { a, family })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn family(&self) -> &CircuitFamily {
        &self.family
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeReport {
    pub a: u32,
    pub m: u32,
    pub range_size: u64,
    pub injective: bool,
    /// Pairs `(b, c)` with `b` outside the range of `F`.
    pub p_prime: u64,
    /// Pairs `(b, c)` with `b ≠ F(c)`.
    pub mismatched_pairs: u64,
    pub identity_holds: bool,
    pub bound: u64,
    pub bound_holds: bool,
    /// `|P′|·2^m` against `3/4·2^{2a+m}`.
    pub weighted: u128,
    pub weighted_bound: u128,
    pub weighted_holds: bool,
    pub fraction: f64,
    pub pass: bool,
}

pub fn dwphp_range_experiment(inst: &DwphpInstance, m: u32, limits: &Limits) -> Result<RangeReport> {
    let a = inst.a;
    if a > 5 {
        return Err(Error::Scale {
            what: "dWPHP parameter a",
            value: a as u64,
            max: 5,
        });
    }
    if m > 32 {
        return Err(Error::Scale {
            what: "random variable count",
            value: m as u64,
            max: 32,
        });
    }
    limits.check_vars(2 * a)?;
    let images: Vec<u64> = (0..1u64 << a)
        .into_par_iter()
        .map(|x| {
            let input: Vec<bool> = (0..a).map(|i| x >> i & 1 == 1).collect();
            inst.family
                .eval(&input)
                .iter()
                .enumerate()
                .map(|(i, &b)| (b as u64) << i)
                .sum()
        })
        .collect();
    let mut hits: BTreeMap<u64, u64> = BTreeMap::new();
    for &y in &images {
        *hits.entry(y).or_default() += 1;
    }
    let range_size = hits.len() as u64;
    let (p_prime, mismatched_pairs) = (0..1u64 << (2 * a))
        .into_par_iter()
        .map(|b| {
            let outside = if hits.contains_key(&b) { 0 } else { 1u64 << a };
            let mismatched = images.iter().filter(|&&y| y != b).count() as u64;
            (outside, mismatched)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let total = 1u64 << (3 * a);
    let bound = total - (1u64 << (2 * a));
    let identity_holds = p_prime == total - (1u64 << a) * range_size;
    let bound_holds = p_prime >= bound;
    let weighted = (p_prime as u128) << m;
    let weighted_bound = 3u128 << (2 * a + m);
    let weighted_holds = 4 * weighted >= weighted_bound;
    Ok(RangeReport {
        a,
        m,
        range_size,
        injective: range_size == 1u64 << a,
        p_prime,
        mismatched_pairs,
        identity_holds,
        bound,
        bound_holds,
        weighted,
        weighted_bound: weighted_bound / 4,
        weighted_holds,
        fraction: p_prime as f64 / total as f64,
        pass: identity_holds && bound_holds && weighted_holds,
    })
}

#[derive(Clone, Debug)]
pub enum SurjectionOutcome {
    /// One tautological element per `Y ∈ 2^m`, with the parameter
    /// assignment it was built from.
    Set(Vec<SurjectionMember>),
    /// Every `Y` for which the hypothesis has no witness, in index order.
    Missing(Vec<Vec<bool>>),
}

#[derive(Clone, Debug)]
pub struct SurjectionMember {
    pub y: Vec<bool>,
    pub witness: Assignment,
    pub element: AlgebraElement,
}

/// `C_i` reads `x_0..x_{n-1}` as inputs `0..n` and parameter `p_j` as input
/// `n + j`; `D_j` reads `p_j` as input `j`. Checks that `A ↦ C(D(A), A)`
/// reaches every `Y ∈ 2^m` and, when it does, builds
/// `{⋀_i (Y(i) ↔ C_i(X_Y, A_Y)) : Y ∈ 2^m}` with `X_Y = D(A_Y)`.
pub fn dwphp_surjection_set(
    m: usize,
    n: usize,
    c: &[Circuit],
    d: &[Circuit],
    limits: &Limits,
) -> Result<SurjectionOutcome> {
    if n >= m {
        return Err(Error::Invalid(format!("need n < m, got n={n}, m={m}")));
    }
    if c.len() != m || d.len() != n {
        return Err(Error::Length {
            what: "C and D".into(),
            expected: m + n,
            got: c.len() + d.len(),
        });
    }
    limits.check_vars(m as u32)?;
    let k = d
        .iter()
        .map(|x| x.num_inputs())
        .chain(c.iter().map(|x| x.num_inputs().saturating_sub(n as u32)))
        .max()
        .unwrap_or(0);
    limits.check_vars(k)?;
    let mut witness: BTreeMap<usize, Assignment> = BTreeMap::new();
    for a in Assignment::all(k) {
        let mut x: Vec<bool> = d.iter().map(|dj| dj.eval_with(a.bits(), &[])).collect();
        x.extend_from_slice(a.bits());
        let y = c
            .iter()
            .enumerate()
            .map(|(i, ci)| (ci.eval_with(&x, &[]) as usize) << i)
            .sum();
        witness.entry(y).or_insert(a);
    }
    let missing: Vec<Vec<bool>> = (0..1usize << m)
        .filter(|y| !witness.contains_key(y))
        .map(|y| (0..m).map(|i| y >> i & 1 == 1).collect())
        .collect();
    if !missing.is_empty() {
        return Ok(SurjectionOutcome::Missing(missing));
    }
    let mut out = Vec::with_capacity(1 << m);
    for (y, a) in witness {
        let ybits: Vec<bool> = (0..m).map(|i| y >> i & 1 == 1).collect();
        let mut b = CircuitBuilder::new(k, 0);
        let xs: Vec<_> = d
            .iter()
            .map(|dj| {
                let v = dj.eval_with(a.bits(), &[]);
                b.constant(v)
            })
            .collect();
        let conj: Vec<_> = c
            .iter()
            .zip(&ybits)
            .map(|(ci, &yi)| {
                let lhs = b.constant(yi);
                let rhs = b.import_with(ci, |b, g| match g {
                    Gate::Var(j) if (j as usize) < n => xs[j as usize],
                    Gate::Var(j) => b.constant(a.bits()[j as usize - n]),
                    g => b.intern(g),
                });
                b.iff(lhs, rhs)
            })
            .collect();
        let root = b.and_all(conj);
        let element = AlgebraElement::from_circuit(b.finish(root), k)?;
        if !element.is_one() {
            return Err(Error::Invalid(format!("member for Y={y} is not a tautology")));
        }
        out.push(SurjectionMember {
            y: ybits,
            witness: a,
            element,
        });
    }
    Ok(SurjectionOutcome::Set(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    fn lim() -> Limits {
        Limits::default()
    }

    fn block(text: &str, n: u32, m: u32) -> RandCircuit {
        RandCircuit::block(parse_circuit(text).unwrap(), n, m).unwrap()
    }

    const OR2: &str = "nvars 1 nrand 2\n0 RVAR 0\n1 RVAR 1\n2 OR 0 1\nOUTPUT 2\n";
    const AND2: &str = "nvars 1 nrand 2\n0 RVAR 0\n1 RVAR 1\n2 AND 0 1\nOUTPUT 2\n";
    const Z0: &str = "nvars 1 nrand 2\n0 RVAR 0\nOUTPUT 0\n";

    #[test]
    fn threshold_cases() {
        let a = Assignment::from_bits(vec![false]);
        assert_eq!(eval_R(&block(OR2, 1, 2), &a, &lim()).unwrap(), TriBool::One);
        assert_eq!(eval_R(&block(AND2, 1, 2), &a, &lim()).unwrap(), TriBool::Zero);
        assert_eq!(eval_R(&block(Z0, 1, 2), &a, &lim()).unwrap(), TriBool::Undefined);
        assert_eq!(TriBool::from_count(3, 2), TriBool::One);
        assert_eq!(TriBool::from_count(1, 2), TriBool::Zero);
        assert_eq!(TriBool::from_count(0, 0), TriBool::Zero);
        assert_eq!(TriBool::from_count(1, 0), TriBool::One);
    }

    #[test]
    fn order_and_quotient() {
        let one = RandCircuit::plain(Circuit::constant(true, 1), 1).unwrap();
        let r = block(OR2, 1, 2);
        assert!(leq_R(&r, &one, 1, &lim()).unwrap() && leq_R(&one, &r, 1, &lim()).unwrap());
        let gap = block(Z0, 1, 2);
        assert!(matches!(leq_R(&gap, &one, 1, &lim()), Err(Error::Unresolved(_))));
        let e = RandElement::new(r, &lim()).unwrap();
        let p = RandElement::new(RandCircuit::plain(Circuit::var(0, 1), 1).unwrap(), &lim()).unwrap();
        let m = e.complement().join(&p).unwrap();
        assert_eq!(m.table().to_string(), "01");
        assert_eq!(resolve(m.circuit(), &lim()).unwrap(), *m.table());
    }

    #[test]
    fn unused_random_variables_do_not_matter() {
        let r = block(Z0, 1, 2);
        let a = Assignment::from_bits(vec![true]);
        assert_eq!(block_values(&r, &a, &lim()).unwrap()[0].0, 2);
        assert_eq!(block_values(&r.with_rand(5), &a, &lim()).unwrap()[0].0, 16);
        assert_eq!(eval_R(&r.with_rand(5), &a, &lim()).unwrap(), TriBool::Undefined);
    }

    fn family(a: u32, f: impl Fn(u64) -> u64) -> DwphpInstance {
        let circuits = (0..2 * a)
            .map(|i| crate::circuit::circuit_from_table(&TruthTable::from_fn(a, |x| f(x as u64) >> i & 1 == 1)))
            .collect();
        DwphpInstance::new(a, CircuitFamily::new(a, circuits).unwrap()).unwrap()
    }

    #[test]
    fn range_counts() {
        let inj = dwphp_range_experiment(&family(2, |x| x), 3, &lim()).unwrap();
        assert_eq!((inj.range_size, inj.p_prime, inj.mismatched_pairs), (4, 48, 60));
        assert!(inj.pass && inj.injective && inj.p_prime == inj.bound);
        let cst = dwphp_range_experiment(&family(2, |_| 5), 0, &lim()).unwrap();
        assert_eq!((cst.range_size, cst.p_prime), (1, 60));
        assert!(cst.pass && !cst.injective);
        let r3 = dwphp_range_experiment(&family(3, |x| x * x % 64), 0, &lim()).unwrap();
        assert!(r3.p_prime >= 448 && r3.fraction >= 0.875);
    }

    #[test]
    fn surjection_sets() {
        let x0 = Circuit::var(0, 1);
        let nx0 = parse_circuit("nvars 1 nrand 0\n0 VAR 0\n1 NOT 0\nOUTPUT 1\n").unwrap();
        let p0 = Circuit::var(0, 1);
        match dwphp_surjection_set(2, 1, &[x0.clone(), nx0], std::slice::from_ref(&p0), &lim()).unwrap() {
            SurjectionOutcome::Missing(ys) => assert!(ys.contains(&vec![true, true])),
            _ => panic!("hypothesis should fail"),
        }
        assert!(dwphp_surjection_set(2, 2, &[x0.clone(), x0.clone()], &[p0.clone(), p0.clone()], &lim()).is_err());
        // C reads the parameters directly, so every Y is reached
        let c = [Circuit::var(1, 3), Circuit::var(2, 3)];
        match dwphp_surjection_set(2, 1, &c, &[Circuit::var(0, 2)], &lim()).unwrap() {
            SurjectionOutcome::Set(s) => {
                assert_eq!(s.len(), 4);
                assert!(s.iter().all(|e| e.element.is_one()));
            }
            _ => panic!("hypothesis should hold"),
        }
        match dwphp_surjection_set(2, 1, &[x0, c[0].clone()], &[Circuit::var(0, 2)], &lim()).unwrap() {
            SurjectionOutcome::Missing(ys) => assert_eq!(ys.len(), 2),
            _ => panic!(),
        }
    }
}
