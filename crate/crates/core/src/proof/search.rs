//! Bounded forward search for EF(S) proofs. The search never claims
//! completeness: a missing proof only means none was found.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::check::{check_ef_s, split_imp};
use super::{Justification, Proof, ProofBuilder, Scheme};
use crate::circuit::{AlgebraElement, Assignment, CircuitBuilder, Gate, NodeId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchLimits {
    pub rounds: usize,
    pub max_lines: usize,
    pub pool: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            rounds: 3,
            max_lines: 20_000,
            pool: 12,
        }
    }
}

#[derive(Clone, Debug)]
pub enum EntailVerdict {
    Entailed(Proof),
    /// `⋀S ∧ ¬C` holds here, so no proof exists at any size.
    SemanticallyRefuted(Assignment),
    NotFound,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub enum ConsistencyVerdict {
    /// `⋀S` holds here, so no refutation exists at any size.
    Consistent(Assignment),
    Inconsistent(Proof),
    Unknown,
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug)]
enum Step {
    Premise,
    Axiom(Scheme),
    Mp(NodeId, NodeId),
}

struct Search {
    b: CircuitBuilder,
    derived: HashMap<NodeId, (Step, usize)>,
    order: Vec<NodeId>,
    max_lines: usize,
    exhausted: bool,
}

impl Search {
    fn cost(&self, x: NodeId) -> usize {
        self.derived[&x].1
    }

    fn add(&mut self, x: NodeId, step: Step) -> bool {
        if self.derived.contains_key(&x) {
            return false;
        }
        if self.order.len() >= self.max_lines {
            self.exhausted = true;
            return false;
        }
        let deps = match step {
            Step::Mp(a, i) => self.cost(a) + self.cost(i),
            _ => 0,
        };
        let cost = self.b.size_of(x) + deps;
        self.derived.insert(x, (step, cost));
        self.order.push(x);
        true
    }

    fn axiom(&mut self, s: Scheme, args: &[NodeId]) -> NodeId {
        let x = s.instance(&mut self.b, args);
        self.add(x, Step::Axiom(s));
        x
    }

    /// Adds `B` from derived `A` and `A → B`.
    fn mp(&mut self, a: NodeId, imp: NodeId) -> Option<NodeId> {
        if !self.derived.contains_key(&a) || !self.derived.contains_key(&imp) {
            return None;
        }
        let (x, y) = split_imp(&self.b, imp)?;
        debug_assert_eq!(x, a);
        self.add(y, Step::Mp(a, imp));
        Some(y)
    }

    fn mp_closure(&mut self) {
        loop {
            let mut changed = false;
            for i in 0..self.order.len() {
                let imp = self.order[i];
                if let Some((x, y)) = split_imp(&self.b, imp) {
                    if self.derived.contains_key(&x) && !self.derived.contains_key(&y) {
                        changed |= self.add(y, Step::Mp(x, imp));
                    }
                }
            }
            if !changed || self.exhausted {
                return;
            }
        }
    }

    fn subformulas(&self, roots: &[NodeId], limit: usize) -> Vec<NodeId> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack: Vec<NodeId> = roots.to_vec();
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            out.push(x);
            match self.b.gate(x) {
                Gate::Not(u) => stack.push(u),
                Gate::And(u, v) | Gate::Or(u, v) => stack.extend([u, v]),
                _ => {}
            }
        }
        out.sort_by_key(|&x| (self.b.size_of(x), x));
        out.truncate(limit);
        out
    }

    fn round(&mut self, pool: &[NodeId], target: NodeId) {
        let snapshot = self.order.clone();
        for &a in &snapshot {
            for &x in pool {
                if self.exhausted {
                    return;
                }
                let k = self.axiom(Scheme::K, &[a, x]);
                self.mp(a, k);
            }
        }
        let mut i = 0;
        while i < self.order.len() && !self.exhausted {
            let line = self.order[i];
            i += 1;
            if let Some((u, v)) = split_imp(&self.b, line) {
                if let (Gate::Not(a), Gate::Not(x)) = (self.b.gate(u), self.b.gate(v)) {
                    let cp = self.axiom(Scheme::Cp, &[a, x]);
                    self.mp(line, cp);
                }
            }
            if let Gate::And(u, v) = self.b.gate(line) {
                let e1 = self.axiom(Scheme::AndE1, &[u, v]);
                self.mp(line, e1);
                let e2 = self.axiom(Scheme::AndE2, &[u, v]);
                self.mp(line, e2);
            }
        }
        self.mp_closure();
        self.introduce(target);
    }

    fn introduce(&mut self, target: NodeId) {
        match self.b.gate(target) {
            Gate::And(u, v) if self.derived.contains_key(&u) && self.derived.contains_key(&v) => {
                let ax = self.axiom(Scheme::AndI, &[u, v]);
                if let Some(rest) = self.mp(u, ax) {
                    self.mp(v, rest);
                }
            }
            Gate::Or(u, v) => {
                if self.derived.contains_key(&u) {
                    let ax = self.axiom(Scheme::OrI1, &[u, v]);
                    self.mp(u, ax);
                } else if self.derived.contains_key(&v) {
                    let ax = self.axiom(Scheme::OrI2, &[u, v]);
                    self.mp(v, ax);
                }
            }
            _ => {}
        }
    }

    fn extract(&self, target: NodeId, n: u32) -> Proof {
        let mut pb = ProofBuilder::new(n);
        pb.b = self.b.clone();
        let mut line_of: HashMap<NodeId, usize> = HashMap::new();
        // iterative post-order over the derivation graph
        let mut stack = vec![(target, false)];
        while let Some((x, expanded)) = stack.pop() {
            if line_of.contains_key(&x) {
                continue;
            }
            let step = self.derived[&x].0;
            if !expanded {
                stack.push((x, true));
                if let Step::Mp(a, i) = step {
                    stack.push((i, false));
                    stack.push((a, false));
                }
                continue;
            }
            let just = match step {
                Step::Premise => Justification::Premise,
                Step::Axiom(s) => Justification::Axiom(s),
                Step::Mp(a, i) => Justification::Mp {
                    premise: line_of[&a],
                    implication: line_of[&i],
                },
            };
            line_of.insert(x, pb.line(x, just));
        }
        pb.finish()
    }
}

fn search_proof(
    s: &[AlgebraElement],
    target: &AlgebraElement,
    l: usize,
    n: u32,
    limits: &SearchLimits,
) -> Result<Option<std::result::Result<Proof, ()>>> {
    let mut st = Search {
        b: CircuitBuilder::new(n, 0),
        derived: HashMap::new(),
        order: Vec::new(),
        max_lines: limits.max_lines,
        exhausted: false,
    };
    let t = st.b.import(target.witness());
    for e in s {
        let x = st.b.import(e.witness());
        st.add(x, Step::Premise);
        if e == target {
            st.add(t, Step::Premise);
        }
    }
    st.axiom(Scheme::True, &[]);
    st.axiom(Scheme::False, &[]);
    st.mp_closure();
    let zero = st.b.constant(false);
    let one = st.b.not(zero);
    let nt = st.b.not(t);
    let premises: Vec<NodeId> = st.order.clone();
    let mut pool = vec![t, nt, zero, one];
    for x in st.subformulas(&[&[t][..], &premises].concat(), limits.pool) {
        if !pool.contains(&x) {
            pool.push(x);
        }
    }
    for _ in 0..limits.rounds {
        if st.derived.contains_key(&t) || st.exhausted {
            break;
        }
        let before = st.order.len();
        st.round(&pool, t);
        if st.order.len() == before {
            break;
        }
    }
    if !st.derived.contains_key(&t) {
        return Ok(if st.exhausted { None } else { Some(Err(())) });
    }
    let proof = st.extract(t, n);
    check_ef_s(&proof, s, n).map_err(|e| Error::Inconsistent(format!("search produced a rejected proof: {e}")))?;
    Ok(Some(if proof.total_size() <= l { Ok(proof) } else { Err(()) }))
}

fn first_point(x: &AlgebraElement) -> Option<Assignment> {
    x.atoms_below().next()
}

/// Whether `S` entails `C` with a proof of total size at most `l`.
pub fn l_entails(
    s: &[AlgebraElement],
    c: &AlgebraElement,
    l: usize,
    n: u32,
    limits: &SearchLimits,
) -> Result<EntailVerdict> {
    let gap = AlgebraElement::meet_all(n, s)?.meet(&c.complement())?;
    if let Some(a) = first_point(&gap) {
        return Ok(EntailVerdict::SemanticallyRefuted(a));
    }
    Ok(match search_proof(s, c, l, n, limits)? {
        Some(Ok(p)) => EntailVerdict::Entailed(p),
        Some(Err(())) => EntailVerdict::NotFound,
        None => EntailVerdict::BudgetExhausted,
    })
}

/// Whether `S` has no refutation of total size at most `l`.
pub fn l_consistent(s: &[AlgebraElement], l: usize, n: u32, limits: &SearchLimits) -> Result<ConsistencyVerdict> {
    let meet = AlgebraElement::meet_all(n, s)?;
    if let Some(a) = first_point(&meet) {
        return Ok(ConsistencyVerdict::Consistent(a));
    }
    Ok(match search_proof(s, &AlgebraElement::zero(n), l, n, limits)? {
        Some(Ok(p)) => ConsistencyVerdict::Inconsistent(p),
        Some(Err(())) => ConsistencyVerdict::Unknown,
        None => ConsistencyVerdict::BudgetExhausted,
    })
}
