//! Hash-consed Boolean circuits over input variables `p_k` and random variables `z_k`.
//!
//! A [`Circuit`] is an immutable, topologically ordered gate list with a designated
//! output. Circuits are produced by a [`CircuitBuilder`], which interns every gate so
//! that structurally identical subgraphs receive one node identifier. Circuits built
//! through separate builders are compared by importing them into a common builder.

mod algebra;
mod table;
mod text;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;

pub use algebra::AlgebraElement;
pub use table::{Assignment, TruthTable};
pub use text::{parse_circuit, parse_dag, write_dag, CircuitDag};

pub(crate) use table::{tabulate, Leaf};

/// Index of a gate inside a circuit arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Var(u32),
    RVar(u32),
    Const(bool),
    Not(NodeId),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
}

impl Gate {
    fn children(&self) -> impl Iterator<Item = NodeId> {
        let (a, b) = match *self {
            Gate::Not(c) => (Some(c), None),
            Gate::And(x, y) | Gate::Or(x, y) => (Some(x), Some(y)),
            _ => (None, None),
        };
        a.into_iter().chain(b)
    }

    fn remap(&self, map: &[NodeId]) -> Gate {
        match *self {
            Gate::Not(c) => Gate::Not(map[c.index()]),
            Gate::And(x, y) => Gate::And(map[x.index()], map[y.index()]),
            Gate::Or(x, y) => Gate::Or(map[x.index()], map[y.index()]),
            g => g,
        }
    }
}

/// An immutable circuit: a shared gate arena plus an output node.
#[derive(Clone, Debug)]
pub struct Circuit {
    gates: Arc<[Gate]>,
    output: NodeId,
    num_inputs: u32,
    num_rand: u32,
}

impl Circuit {
    /// Builds a circuit from raw parts, validating ordering and variable ranges.
    pub fn from_gates(gates: Vec<Gate>, output: NodeId, num_inputs: u32, num_rand: u32) -> Result<Self> {
        let mut b = CircuitBuilder::new(num_inputs, num_rand);
        let mut map = Vec::with_capacity(gates.len());
        for (i, g) in gates.iter().enumerate() {
            for c in g.children() {
                if c.index() >= i {
                    return Err(Error::Invalid(format!("gate {i} references later node {c}")));
                }
            }
            match *g {
                Gate::Var(k) if k >= num_inputs => {
                    return Err(Error::Invalid(format!("VAR {k} out of range (nvars {num_inputs})")))
                }
                Gate::RVar(k) if k >= num_rand => {
                    return Err(Error::Invalid(format!("RVAR {k} out of range (nrand {num_rand})")))
                }
                _ => {}
            }
            map.push(b.intern(g.remap(&map)));
        }
        let out = *map
            .get(output.index())
            .ok_or_else(|| Error::Invalid(format!("output {output} out of range")))?;
        Ok(b.finish(out))
    }

    pub fn constant(value: bool, num_inputs: u32) -> Self {
        let mut b = CircuitBuilder::new(num_inputs, 0);
        let c = b.constant(value);
        b.finish(c)
    }

    /// The projection circuit `p_k` over `num_inputs` variables.
    pub fn var(k: u32, num_inputs: u32) -> Self {
        let mut b = CircuitBuilder::new(num_inputs, 0);
        let v = b.var(k);
        b.finish(v)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> NodeId {
        self.output
    }

    pub fn output_gate(&self) -> Gate {
        self.gates[self.output.index()]
    }

    pub fn num_inputs(&self) -> u32 {
        self.num_inputs
    }

    pub fn num_rand(&self) -> u32 {
        self.num_rand
    }

    /// A copy declaring more input/random variables; the gates are unchanged.
    pub fn widened(&self, num_inputs: u32, num_rand: u32) -> Self {
        Circuit {
            gates: self.gates.clone(),
            output: self.output,
            num_inputs: num_inputs.max(self.num_inputs),
            num_rand: num_rand.max(self.num_rand),
        }
    }

    /// A copy declaring exactly `num_inputs` input variables, provided every
    /// variable that occurs is below it.
    pub fn with_inputs(&self, num_inputs: u32) -> Result<Self> {
        if let Some(&k) = self.support().iter().next_back().filter(|&&k| k >= num_inputs) {
            return Err(Error::Arity {
                expected: num_inputs as usize,
                got: k as usize + 1,
            });
        }
        Ok(Circuit {
            num_inputs,
            ..self.clone()
        })
    }

    fn reachable(&self) -> Vec<bool> {
        let mut mark = vec![false; self.output.index() + 1];
        mark[self.output.index()] = true;
        for i in (0..=self.output.index()).rev() {
            if mark[i] {
                for c in self.gates[i].children() {
                    mark[c.index()] = true;
                }
            }
        }
        mark
    }

    /// Number of distinct nodes reachable from the output.
    pub fn size(&self) -> usize {
        self.reachable().into_iter().filter(|&m| m).count()
    }

    /// Input variables that actually occur below the output.
    pub fn support(&self) -> BTreeSet<u32> {
        self.leaves(|g| match g {
            Gate::Var(k) => Some(k),
            _ => None,
        })
    }

    pub fn random_support(&self) -> BTreeSet<u32> {
        self.leaves(|g| match g {
            Gate::RVar(k) => Some(k),
            _ => None,
        })
    }

    fn leaves(&self, pick: impl Fn(Gate) -> Option<u32>) -> BTreeSet<u32> {
        self.reachable()
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .filter_map(|(i, _)| pick(self.gates[i]))
            .collect()
    }

    /// Evaluates a plain circuit at an input assignment.
    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        if a.len() != self.num_inputs as usize {
            return Err(Error::Arity {
                expected: self.num_inputs as usize,
                got: a.len(),
            });
        }
        if let Some(&k) = self.random_support().iter().next() {
            return Err(Error::RandomVariable(k));
        }
        Ok(self.eval_with(a.bits(), &[]))
    }

    /// Evaluates with explicit input and random bits. Missing bits read as false.
    pub fn eval_with(&self, inputs: &[bool], rand: &[bool]) -> bool {
        let end = self.output.index() + 1;
        let mut vals: Vec<bool> = Vec::with_capacity(end);
        for g in &self.gates[..end] {
            let v = match *g {
                Gate::Var(k) => inputs.get(k as usize).copied().unwrap_or(false),
                Gate::RVar(k) => rand.get(k as usize).copied().unwrap_or(false),
                Gate::Const(b) => b,
                Gate::Not(c) => !vals[c.index()],
                Gate::And(x, y) => vals[x.index()] && vals[y.index()],
                Gate::Or(x, y) => vals[x.index()] || vals[y.index()],
            };
            vals.push(v);
        }
        vals[end - 1]
    }

    /// Full truth table over `n` input variables, under the default limits.
    pub fn truth_table(&self, n: u32) -> Result<TruthTable> {
        self.truth_table_within(n, &Limits::default())
    }

    pub fn truth_table_within(&self, n: u32, limits: &Limits) -> Result<TruthTable> {
        limits.check_vars(n)?;
        if self.num_inputs > n {
            return Err(Error::Arity {
                expected: n as usize,
                got: self.num_inputs as usize,
            });
        }
        tabulate(self, n, |g| match g {
            Gate::Var(k) => Ok(Leaf::Var(k)),
            Gate::RVar(k) => Err(Error::RandomVariable(k)),
            _ => unreachable!(),
        })
    }

    /// Decides validity by tabulating over the variables that occur.
    pub fn is_tautology(&self, limits: &Limits) -> Result<bool> {
        let support: Vec<u32> = self.support().into_iter().collect();
        let n = support.len() as u32;
        limits.check_vars(n)?;
        let table = tabulate(self, n, |g| match g {
            Gate::Var(k) => Ok(Leaf::Var(support.binary_search(&k).unwrap() as u32)),
            Gate::RVar(k) => Err(Error::RandomVariable(k)),
            _ => unreachable!(),
        })?;
        Ok(table.is_one())
    }

    /// Structural identity, independent of arena layout.
    pub fn same_structure(&self, other: &Circuit) -> bool {
        let mut b = CircuitBuilder::new(0, 0);
        b.import(self) == b.import(other)
    }

    pub fn to_text(&self) -> String {
        text::write_circuit(self)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(c: &Circuit, id: NodeId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match c.gates[id.index()] {
                Gate::Var(k) => write!(f, "p{k}"),
                Gate::RVar(k) => write!(f, "z{k}"),
                Gate::Const(b) => write!(f, "{}", b as u8),
                Gate::Not(x) => {
                    write!(f, "!")?;
                    go(c, x, f)
                }
                Gate::And(x, y) | Gate::Or(x, y) => {
                    let op = if matches!(c.gates[id.index()], Gate::And(..)) {
                        "&"
                    } else {
                        "|"
                    };
                    write!(f, "(")?;
                    go(c, x, f)?;
                    write!(f, " {op} ")?;
                    go(c, y, f)?;
                    write!(f, ")")
                }
            }
        }
        go(self, self.output, f)
    }
}

/// Interning constructor for circuits.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    index: HashMap<Gate, NodeId>,
    num_inputs: u32,
    num_rand: u32,
}

impl CircuitBuilder {
    pub fn new(num_inputs: u32, num_rand: u32) -> Self {
        CircuitBuilder {
            num_inputs,
            num_rand,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn num_inputs(&self) -> u32 {
        self.num_inputs
    }

    pub fn gate(&self, id: NodeId) -> Gate {
        self.gates[id.index()]
    }

    /// Looks a gate up without interning it.
    pub fn find(&self, g: Gate) -> Option<NodeId> {
        self.index.get(&g).copied()
    }

    pub fn intern(&mut self, g: Gate) -> NodeId {
        match g {
            Gate::Var(k) => self.num_inputs = self.num_inputs.max(k + 1),
            Gate::RVar(k) => self.num_rand = self.num_rand.max(k + 1),
            _ => {}
        }
        if let Some(&id) = self.index.get(&g) {
            return id;
        }
        let id = NodeId(self.gates.len() as u32);
        self.gates.push(g);
        self.index.insert(g, id);
        id
    }

    pub fn var(&mut self, k: u32) -> NodeId {
        self.intern(Gate::Var(k))
    }

    pub fn rvar(&mut self, k: u32) -> NodeId {
        self.intern(Gate::RVar(k))
    }

    pub fn constant(&mut self, b: bool) -> NodeId {
        self.intern(Gate::Const(b))
    }

    pub fn not(&mut self, x: NodeId) -> NodeId {
        self.intern(Gate::Not(x))
    }

    pub fn and(&mut self, x: NodeId, y: NodeId) -> NodeId {
        self.intern(Gate::And(x, y))
    }

    pub fn or(&mut self, x: NodeId, y: NodeId) -> NodeId {
        self.intern(Gate::Or(x, y))
    }

    /// `x -> y`, encoded as `OR(NOT x, y)`.
    pub fn imp(&mut self, x: NodeId, y: NodeId) -> NodeId {
        let nx = self.not(x);
        self.or(nx, y)
    }

    /// `x <-> y`, encoded as `AND(x -> y, y -> x)`.
    pub fn iff(&mut self, x: NodeId, y: NodeId) -> NodeId {
        let a = self.imp(x, y);
        let b = self.imp(y, x);
        self.and(a, b)
    }

    fn const_of(&self, x: NodeId) -> Option<bool> {
        match self.gates[x.index()] {
            Gate::Const(b) => Some(b),
            _ => None,
        }
    }

    pub fn not_fold(&mut self, x: NodeId) -> NodeId {
        match self.const_of(x) {
            Some(b) => self.constant(!b),
            None => self.not(x),
        }
    }

    pub fn and_fold(&mut self, x: NodeId, y: NodeId) -> NodeId {
        match (self.const_of(x), self.const_of(y)) {
            (Some(false), _) | (_, Some(false)) => self.constant(false),
            (Some(true), _) => y,
            (_, Some(true)) => x,
            _ if x == y => x,
            _ => self.and(x, y),
        }
    }

    pub fn or_fold(&mut self, x: NodeId, y: NodeId) -> NodeId {
        match (self.const_of(x), self.const_of(y)) {
            (Some(true), _) | (_, Some(true)) => self.constant(true),
            (Some(false), _) => y,
            (_, Some(false)) => x,
            _ if x == y => x,
            _ => self.or(x, y),
        }
    }

    pub fn imp_fold(&mut self, x: NodeId, y: NodeId) -> NodeId {
        let nx = self.not_fold(x);
        self.or_fold(nx, y)
    }

    pub fn iff_fold(&mut self, x: NodeId, y: NodeId) -> NodeId {
        let a = self.imp_fold(x, y);
        let b = self.imp_fold(y, x);
        self.and_fold(a, b)
    }

    /// Left-folded conjunction with constant folding; empty means true.
    pub fn and_all(&mut self, items: impl IntoIterator<Item = NodeId>) -> NodeId {
        let mut acc = self.constant(true);
        for x in items {
            acc = self.and_fold(acc, x);
        }
        acc
    }

    /// Left-folded disjunction with constant folding; empty means false.
    pub fn or_all(&mut self, items: impl IntoIterator<Item = NodeId>) -> NodeId {
        let mut acc = self.constant(false);
        for x in items {
            acc = self.or_fold(acc, x);
        }
        acc
    }

    /// Copies a circuit into this builder, preserving its structure.
    pub fn import(&mut self, c: &Circuit) -> NodeId {
        self.import_with(c, |b, g| b.intern(g))
    }

    /// Copies a circuit, replacing each leaf (`Var`, `RVar`, `Const`) by `leaf(self, gate)`.
    pub fn import_with(&mut self, c: &Circuit, mut leaf: impl FnMut(&mut Self, Gate) -> NodeId) -> NodeId {
        let reach = c.reachable();
        let mut map = vec![NodeId(0); reach.len()];
        for (i, g) in c.gates[..reach.len()].iter().enumerate() {
            if !reach[i] {
                continue;
            }
            map[i] = match g {
                Gate::Var(_) | Gate::RVar(_) | Gate::Const(_) => leaf(self, *g),
                _ => self.intern(g.remap(&map)),
            };
        }
        map[c.output.index()]
    }

    /// Variables below a node of this builder.
    pub fn support_of(&self, root: NodeId) -> BTreeSet<u32> {
        let mut seen = vec![false; root.index() + 1];
        let mut stack = vec![root];
        let mut out = BTreeSet::new();
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id.index()], true) {
                continue;
            }
            let g = self.gates[id.index()];
            if let Gate::Var(k) = g {
                out.insert(k);
            }
            stack.extend(g.children());
        }
        out
    }

    /// Number of distinct nodes below `root`.
    pub fn size_of(&self, root: NodeId) -> usize {
        let mut seen = vec![false; root.index() + 1];
        let mut stack = vec![root];
        let mut count = 0;
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id.index()], true) {
                continue;
            }
            count += 1;
            stack.extend(self.gates[id.index()].children());
        }
        count
    }

    pub fn finish(&self, output: NodeId) -> Circuit {
        self.finish_many(&[output]).pop().unwrap()
    }

    /// Snapshots several outputs over one compacted, shared arena.
    pub fn finish_many(&self, outputs: &[NodeId]) -> Vec<Circuit> {
        let top = outputs.iter().map(|o| o.index()).max().unwrap_or(0);
        let mut mark = vec![false; top + 1];
        for o in outputs {
            mark[o.index()] = true;
        }
        for i in (0..=top).rev() {
            if mark[i] {
                for c in self.gates[i].children() {
                    mark[c.index()] = true;
                }
            }
        }
        let mut map = vec![NodeId(u32::MAX); top + 1];
        let mut gates = Vec::new();
        for i in 0..=top {
            if mark[i] {
                map[i] = NodeId(gates.len() as u32);
                gates.push(self.gates[i].remap(&map));
            }
        }
        let arena: Arc<[Gate]> = gates.into();
        outputs
            .iter()
            .map(|o| Circuit {
                gates: arena.clone(),
                output: map[o.index()],
                num_inputs: self.num_inputs,
                num_rand: self.num_rand,
            })
            .collect()
    }
}

/// Synthesizes a witness circuit for a truth table by Shannon expansion on the
/// highest variable, sharing equal cofactors.
pub fn circuit_from_table(table: &TruthTable) -> Circuit {
    let n = table.num_vars();
    let bits: Vec<bool> = (0..table.len()).map(|i| table.get(i)).collect();
    let mut b = CircuitBuilder::new(n, 0);
    let mut memo: HashMap<Vec<bool>, NodeId> = HashMap::new();
    fn go(b: &mut CircuitBuilder, memo: &mut HashMap<Vec<bool>, NodeId>, bits: &[bool]) -> NodeId {
        if let Some(&id) = memo.get(bits) {
            return id;
        }
        let id = if bits.iter().all(|&x| x) {
            b.constant(true)
        } else if bits.iter().all(|&x| !x) {
            b.constant(false)
        } else {
            let half = bits.len() / 2;
            let var = half.trailing_zeros();
            let lo = go(b, memo, &bits[..half]);
            let hi = go(b, memo, &bits[half..]);
            let v = b.var(var);
            if lo == hi {
                lo
            } else {
                let nv = b.not_fold(v);
                let l = b.and_fold(nv, lo);
                let h = b.and_fold(v, hi);
                b.or_fold(h, l)
            }
        };
        memo.insert(bits.to_vec(), id);
        id
    }
    let out = go(&mut b, &mut memo, &bits);
    let mut c = b.finish(out);
    c.num_inputs = n;
    c
}
