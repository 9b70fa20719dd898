//! Extended Frege style proofs: EF, EF with premises, and WF with dual weak
//! pigeonhole axioms.
//!
//! Implication `A → B` is the circuit `OR(NOT A, B)`; equivalence `A ↔ B` is
//! `AND(A → B, B → A)`. Axiom instances and modus ponens are matched
//! structurally, premises semantically.

mod check;
mod search;
mod text;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::circuit::{Circuit, CircuitBuilder, NodeId};
use crate::error::Error;

pub use check::{check_ef, check_ef_s, check_wf, check_wf_s, leq_ef, LineError, ProofStats, Reject};
pub use search::{l_consistent, l_entails, ConsistencyVerdict, EntailVerdict, SearchLimits};
pub use text::{parse_proof, write_proof};

/// The axiom schemes. Letters are schematic circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Scheme {
    /// `A → (B → A)`
    K,
    /// `(A → (B → C)) → ((A → B) → (A → C))`
    S,
    /// `(¬A → ¬B) → (B → A)`
    Cp,
    /// `A → (B → A ∧ B)`
    AndI,
    /// `A ∧ B → A`
    AndE1,
    /// `A ∧ B → B`
    AndE2,
    /// `A → A ∨ B`
    OrI1,
    /// `B → A ∨ B`
    OrI2,
    /// `(A → C) → ((B → C) → (A ∨ B → C))`
    OrE,
    /// `1`
    True,
    /// `¬0`
    False,
}

impl Scheme {
    pub const ALL: [Scheme; 11] = [
        Scheme::K,
        Scheme::S,
        Scheme::Cp,
        Scheme::AndI,
        Scheme::AndE1,
        Scheme::AndE2,
        Scheme::OrI1,
        Scheme::OrI2,
        Scheme::OrE,
        Scheme::True,
        Scheme::False,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::K => "K",
            Scheme::S => "S",
            Scheme::Cp => "CP",
            Scheme::AndI => "AND-I",
            Scheme::AndE1 => "AND-E1",
            Scheme::AndE2 => "AND-E2",
            Scheme::OrI1 => "OR-I1",
            Scheme::OrI2 => "OR-I2",
            Scheme::OrE => "OR-E",
            Scheme::True => "TRUE",
            Scheme::False => "FALSE",
        }
    }

    /// Number of schematic letters.
    pub fn arity(self) -> usize {
        match self {
            Scheme::True | Scheme::False => 0,
            Scheme::K | Scheme::Cp | Scheme::AndI | Scheme::AndE1 | Scheme::AndE2 | Scheme::OrI1 | Scheme::OrI2 => 2,
            Scheme::S | Scheme::OrE => 3,
        }
    }

    /// The instance with the given letters.
    pub fn instance(self, b: &mut CircuitBuilder, args: &[NodeId]) -> NodeId {
        assert_eq!(
            args.len(),
            self.arity(),
            "{} takes {} letters",
            self.name(),
            self.arity()
        );
        match self {
            Scheme::K => {
                let (a, x) = (args[0], args[1]);
                let inner = b.imp(x, a);
                b.imp(a, inner)
            }
            Scheme::S => {
                let (a, x, c) = (args[0], args[1], args[2]);
                let bc = b.imp(x, c);
                let abc = b.imp(a, bc);
                let ab = b.imp(a, x);
                let ac = b.imp(a, c);
                let rhs = b.imp(ab, ac);
                b.imp(abc, rhs)
            }
            Scheme::Cp => {
                let (a, x) = (args[0], args[1]);
                let na = b.not(a);
                let nx = b.not(x);
                let lhs = b.imp(na, nx);
                let rhs = b.imp(x, a);
                b.imp(lhs, rhs)
            }
            Scheme::AndI => {
                let (a, x) = (args[0], args[1]);
                let both = b.and(a, x);
                let inner = b.imp(x, both);
                b.imp(a, inner)
            }
            Scheme::AndE1 | Scheme::AndE2 => {
                let both = b.and(args[0], args[1]);
                let pick = if self == Scheme::AndE1 { args[0] } else { args[1] };
                b.imp(both, pick)
            }
            Scheme::OrI1 | Scheme::OrI2 => {
                let either = b.or(args[0], args[1]);
                let pick = if self == Scheme::OrI1 { args[0] } else { args[1] };
                b.imp(pick, either)
            }
            Scheme::OrE => {
                let (a, x, c) = (args[0], args[1], args[2]);
                let ac = b.imp(a, c);
                let xc = b.imp(x, c);
                let either = b.or(a, x);
                let last = b.imp(either, c);
                let mid = b.imp(xc, last);
                b.imp(ac, mid)
            }
            Scheme::True => b.constant(true),
            Scheme::False => {
                let z = b.constant(false);
                b.not(z)
            }
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown axiom scheme {s:?}")))
    }
}

/// Parameters of a dual weak pigeonhole line
/// `⋁_{i<m} ¬(r_i ↔ C_i(D_{i,0}, …, D_{i,n-1}))`.
#[derive(Clone, Debug)]
pub struct DwphpParams {
    pub m: usize,
    pub n: usize,
    pub r: Vec<u32>,
    /// `C_i` over the hole variables.
    pub c: Vec<Circuit>,
    /// Either `n` circuits shared by every `i`, or `m·n` circuits with
    /// `D_{i,j}` at `i·n + j`.
    pub d: Vec<Circuit>,
    /// The variables of `C_i` that the `D_{i,j}` replace; `0..n` by default.
    pub holes: Vec<u32>,
}

impl DwphpParams {
    pub fn d_at(&self, i: usize, j: usize) -> &Circuit {
        if self.d.len() == self.n {
            &self.d[j]
        } else {
            &self.d[i * self.n + j]
        }
    }

    /// Builds the line's circuit in `b`.
    pub fn build(&self, b: &mut CircuitBuilder) -> NodeId {
        let mut acc: Option<NodeId> = None;
        for i in 0..self.m {
            let subs: Vec<NodeId> = (0..self.n).map(|j| b.import(self.d_at(i, j))).collect();
            let ci = b.import_with(&self.c[i], |b, g| match g {
                crate::circuit::Gate::Var(k) => match self.holes.iter().position(|&h| h == k) {
                    Some(j) => subs[j],
                    None => b.intern(g),
                },
                g => b.intern(g),
            });
            let r = b.var(self.r[i]);
            let eq = b.iff(r, ci);
            let disj = b.not(eq);
            acc = Some(match acc {
                None => disj,
                Some(a) => b.or(a, disj),
            });
        }
        acc.unwrap_or_else(|| b.constant(false))
    }
}

#[derive(Clone, Debug)]
pub enum Justification {
    Axiom(Scheme),
    /// Modus ponens from the 1-based lines `premise` (`A`) and
    /// `implication` (`A → B`).
    Mp {
        premise: usize,
        implication: usize,
    },
    /// `q ↔ D` for a fresh variable `q`.
    Ext {
        var: u32,
    },
    Premise,
    Dwphp(DwphpParams),
}

impl Justification {
    pub fn kind(&self) -> &'static str {
        match self {
            Justification::Axiom(_) => "AXIOM",
            Justification::Mp { .. } => "MP",
            Justification::Ext { .. } => "EXT",
            Justification::Premise => "PREMISE",
            Justification::Dwphp(_) => "DWPHP",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProofLine {
    pub circuit: Circuit,
    pub just: Justification,
}

impl ProofLine {
    pub fn size(&self) -> usize {
        self.circuit.size()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Proof {
    pub lines: Vec<ProofLine>,
}

impl Proof {
    pub fn new(lines: Vec<ProofLine>) -> Self {
        Proof { lines }
    }

    pub fn push(&mut self, circuit: Circuit, just: Justification) -> usize {
        self.lines.push(ProofLine { circuit, just });
        self.lines.len()
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn conclusion(&self) -> Option<&Circuit> {
        self.lines.last().map(|l| &l.circuit)
    }

    /// `|P|`: total node count over all lines.
    pub fn total_size(&self) -> usize {
        self.lines.iter().map(ProofLine::size).sum()
    }

    pub fn num_vars(&self) -> u32 {
        self.lines.iter().map(|l| l.circuit.num_inputs()).max().unwrap_or(0)
    }
}

/// Incremental construction of proofs over one shared arena.
#[derive(Clone, Debug)]
pub struct ProofBuilder {
    pub b: CircuitBuilder,
    lines: Vec<(NodeId, Justification)>,
}

impl ProofBuilder {
    pub fn new(num_vars: u32) -> Self {
        ProofBuilder {
            b: CircuitBuilder::new(num_vars, 0),
            lines: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn node(&self, line: usize) -> NodeId {
        self.lines[line - 1].0
    }

    pub fn line(&mut self, node: NodeId, just: Justification) -> usize {
        self.lines.push((node, just));
        self.lines.len()
    }

    pub fn axiom(&mut self, s: Scheme, args: &[NodeId]) -> usize {
        let node = s.instance(&mut self.b, args);
        self.line(node, Justification::Axiom(s))
    }

    /// Modus ponens on 1-based lines; panics unless `implication` is
    /// `premise → B`.
    pub fn mp(&mut self, premise: usize, implication: usize) -> usize {
        let a = self.node(premise);
        let (x, y) = self.split_imp(self.node(implication)).expect("not an implication");
        assert_eq!(x, a, "modus ponens antecedent mismatch");
        self.line(y, Justification::Mp { premise, implication })
    }

    pub fn ext(&mut self, q: u32, d: NodeId) -> usize {
        let v = self.b.var(q);
        let node = self.b.iff(v, d);
        self.line(node, Justification::Ext { var: q })
    }

    pub fn premise(&mut self, node: NodeId) -> usize {
        self.line(node, Justification::Premise)
    }

    pub fn split_imp(&self, x: NodeId) -> Option<(NodeId, NodeId)> {
        check::split_imp(&self.b, x)
    }

    pub fn finish(&self) -> Proof {
        let n = self.b.num_inputs();
        let roots: Vec<NodeId> = self.lines.iter().map(|l| l.0).collect();
        let circuits = self.b.finish_many(&roots);
        Proof::new(
            circuits
                .into_iter()
                .zip(&self.lines)
                .map(|(c, (_, j))| ProofLine {
                    circuit: c.widened(n, 0),
                    just: j.clone(),
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::Limits;

    #[test]
    fn every_scheme_instance_is_a_tautology() {
        let mut b = CircuitBuilder::new(3, 0);
        let (p, q) = (b.var(0), b.var(1));
        let r = b.var(2);
        let nr = b.not(r);
        let pq = b.and(p, q);
        for s in Scheme::ALL {
            let args = [pq, nr, q];
            let node = s.instance(&mut b, &args[..s.arity()]);
            let c = b.finish(node);
            assert!(c.is_tautology(&Limits::default()).unwrap(), "{s}");
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
    }

    #[test]
    fn dwphp_line_shape() {
        let p = DwphpParams {
            m: 2,
            n: 1,
            r: vec![1, 2],
            c: vec![Circuit::var(0, 1), Circuit::var(0, 1)],
            d: vec![Circuit::var(0, 3)],
            holes: vec![0],
        };
        let mut b = CircuitBuilder::new(3, 0);
        let node = p.build(&mut b);
        let c = b.finish(node);
        // the line is false only when r_0 = r_1 = p0
        assert_eq!(c.truth_table(3).unwrap().to_string(), "01111110");
    }
}
