use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::{DwphpParams, Justification, Proof, Scheme};
use crate::circuit::{AlgebraElement, CircuitBuilder, Gate, NodeId, TruthTable};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Reject {
    EmptyProof,
    BadInstance(Scheme),
    DanglingReference(usize),
    MpMismatch,
    NotAnExtension,
    NotFresh(u32),
    ExtInDefinition(u32),
    ExtInConclusion(u32),
    ExtClashesWithPremises(u32),
    PremiseNotAllowed,
    PremiseNotInSet,
    DwphpNotAllowed,
    DwphpShape(String),
    DwphpSide(String),
    WrongConclusion,
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("line {line}: {reason:?}")]
pub struct LineError {
    /// 1-based; 0 when the proof as a whole is at fault.
    pub line: usize,
    pub reason: Reject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProofStats {
    pub lines: usize,
    pub total_size: usize,
}

pub(crate) fn split_imp(b: &CircuitBuilder, x: NodeId) -> Option<(NodeId, NodeId)> {
    match b.gate(x) {
        Gate::Or(u, v) => match b.gate(u) {
            Gate::Not(a) => Some((a, v)),
            _ => None,
        },
        _ => None,
    }
}

fn split_and(b: &CircuitBuilder, x: NodeId) -> Option<(NodeId, NodeId)> {
    match b.gate(x) {
        Gate::And(u, v) => Some((u, v)),
        _ => None,
    }
}

fn split_or(b: &CircuitBuilder, x: NodeId) -> Option<(NodeId, NodeId)> {
    match b.gate(x) {
        Gate::Or(u, v) => Some((u, v)),
        _ => None,
    }
}

fn split_not(b: &CircuitBuilder, x: NodeId) -> Option<NodeId> {
    match b.gate(x) {
        Gate::Not(u) => Some(u),
        _ => None,
    }
}

/// Whether `x` is an instance of `s`.
pub(crate) fn matches_scheme(b: &CircuitBuilder, s: Scheme, x: NodeId) -> bool {
    let imp = |x| split_imp(b, x);
    let m = || -> Option<bool> {
        Some(match s {
            Scheme::K => {
                let (a, rest) = imp(x)?;
                let (_, a2) = imp(rest)?;
                a == a2
            }
            Scheme::S => {
                let (l, r) = imp(x)?;
                let (a, bc) = imp(l)?;
                let (b1, c) = imp(bc)?;
                let (ab, ac) = imp(r)?;
                let (a2, b2) = imp(ab)?;
                let (a3, c2) = imp(ac)?;
                a == a2 && a == a3 && b1 == b2 && c == c2
            }
            Scheme::Cp => {
                let (l, r) = imp(x)?;
                let (na, nb) = imp(l)?;
                let (a, b1) = (split_not(b, na)?, split_not(b, nb)?);
                let (b2, a2) = imp(r)?;
                a == a2 && b1 == b2
            }
            Scheme::AndI => {
                let (a, rest) = imp(x)?;
                let (b1, both) = imp(rest)?;
                split_and(b, both)? == (a, b1)
            }
            Scheme::AndE1 | Scheme::AndE2 => {
                let (both, pick) = imp(x)?;
                let (a, b1) = split_and(b, both)?;
                pick == if s == Scheme::AndE1 { a } else { b1 }
            }
            Scheme::OrI1 | Scheme::OrI2 => {
                let (pick, either) = imp(x)?;
                let (a, b1) = split_or(b, either)?;
                pick == if s == Scheme::OrI1 { a } else { b1 }
            }
            Scheme::OrE => {
                let (ac, rest) = imp(x)?;
                let (a, c) = imp(ac)?;
                let (bc, last) = imp(rest)?;
                let (b1, c2) = imp(bc)?;
                let (either, c3) = imp(last)?;
                split_or(b, either)? == (a, b1) && c == c2 && c == c3
            }
            Scheme::True => b.gate(x) == Gate::Const(true),
            Scheme::False => matches!(split_not(b, x).map(|y| b.gate(y)), Some(Gate::Const(false))),
        })
    };
    m().unwrap_or(false)
}

/// `q ↔ D` as `AND(OR(NOT q, D), OR(NOT D, q))`; returns `D`.
fn split_ext(b: &CircuitBuilder, x: NodeId, q: u32) -> Option<NodeId> {
    let (l, r) = split_and(b, x)?;
    let (v, d) = split_imp(b, l)?;
    let (d2, v2) = split_imp(b, r)?;
    (b.gate(v) == Gate::Var(q) && v == v2 && d == d2).then_some(d)
}

struct Premises<'a> {
    n: u32,
    tables: Vec<&'a TruthTable>,
}

struct Mode<'a> {
    premises: Option<Premises<'a>>,
    dwphp: bool,
}

fn run(p: &Proof, mode: Mode<'_>) -> Result<ProofStats, LineError> {
    let fail = |line, reason| Err(LineError { line, reason });
    if p.lines.is_empty() {
        return fail(0, Reject::EmptyProof);
    }
    let mut b = CircuitBuilder::new(p.num_vars(), 0);
    let conclusion = b.import(p.conclusion().unwrap());
    let conclusion_vars = b.support_of(conclusion);
    let mut nodes: Vec<NodeId> = Vec::with_capacity(p.lines.len());
    let mut seen_vars: BTreeSet<u32> = BTreeSet::new();
    for (k, line) in p.lines.iter().enumerate() {
        let num = k + 1;
        let node = b.import(&line.circuit);
        match &line.just {
            Justification::Axiom(s) => {
                if !matches_scheme(&b, *s, node) {
                    return fail(num, Reject::BadInstance(*s));
                }
            }
            Justification::Mp { premise, implication } => {
                for &r in [premise, implication] {
                    if r == 0 || r >= num {
                        return fail(num, Reject::DanglingReference(r));
                    }
                }
                if split_imp(&b, nodes[implication - 1]) != Some((nodes[premise - 1], node)) {
                    return fail(num, Reject::MpMismatch);
                }
            }
            Justification::Ext { var } => {
                let Some(d) = split_ext(&b, node, *var) else {
                    return fail(num, Reject::NotAnExtension);
                };
                if seen_vars.contains(var) {
                    return fail(num, Reject::NotFresh(*var));
                }
                if b.support_of(d).contains(var) {
                    return fail(num, Reject::ExtInDefinition(*var));
                }
                if conclusion_vars.contains(var) {
                    return fail(num, Reject::ExtInConclusion(*var));
                }
                if let Some(s) = &mode.premises {
                    if *var < s.n {
                        return fail(num, Reject::ExtClashesWithPremises(*var));
                    }
                }
            }
            Justification::Premise => {
                let Some(s) = &mode.premises else {
                    return fail(num, Reject::PremiseNotAllowed);
                };
                let found = b
                    .finish(node)
                    .with_inputs(s.n)
                    .and_then(|c| c.truth_table(s.n))
                    .is_ok_and(|t| s.tables.iter().any(|&x| *x == t));
                if !found {
                    return fail(num, Reject::PremiseNotInSet);
                }
            }
            Justification::Dwphp(params) => {
                if !mode.dwphp {
                    return fail(num, Reject::DwphpNotAllowed);
                }
                check_dwphp(&mut b, params, node, &seen_vars).map_err(|reason| LineError { line: num, reason })?;
            }
        }
        seen_vars.extend(b.support_of(node));
        nodes.push(node);
    }
    Ok(ProofStats {
        lines: p.lines.len(),
        total_size: p.total_size(),
    })
}

fn check_dwphp(b: &mut CircuitBuilder, p: &DwphpParams, node: NodeId, seen: &BTreeSet<u32>) -> Result<(), Reject> {
    let shape = |s: String| Err(Reject::DwphpShape(s));
    if p.n >= p.m {
        return shape(format!("need n < m, got n={} m={}", p.n, p.m));
    }
    if p.r.len() != p.m || p.c.len() != p.m {
        return shape(format!("need {} variables and circuits", p.m));
    }
    if p.d.len() != p.n && p.d.len() != p.m * p.n {
        return shape(format!("need {} or {} D circuits, got {}", p.n, p.m * p.n, p.d.len()));
    }
    if p.holes.len() != p.n {
        return shape(format!("need {} hole variables, got {}", p.n, p.holes.len()));
    }
    let mut distinct = BTreeSet::new();
    for (i, &r) in p.r.iter().enumerate() {
        if !distinct.insert(r) {
            return Err(Reject::DwphpSide(format!("r_{i} = p{r} is repeated")));
        }
        if seen.contains(&r) {
            return Err(Reject::DwphpSide(format!("r_{i} = p{r} occurs in an earlier line")));
        }
        if let Some(j) = p.c.iter().position(|c| c.support().contains(&r)) {
            return Err(Reject::DwphpSide(format!("r_{i} = p{r} occurs in C_{j}")));
        }
        if p.holes.contains(&r) {
            return Err(Reject::DwphpSide(format!("r_{i} = p{r} is a hole variable")));
        }
    }
    if p.build(b) != node {
        return shape("the line is not the displayed disjunction".into());
    }
    Ok(())
}

/// Checks an EF proof: axioms, modus ponens and extension only.
pub fn check_ef(p: &Proof) -> Result<ProofStats, LineError> {
    run(
        p,
        Mode {
            premises: None,
            dwphp: false,
        },
    )
}

/// Checks an EF(S) proof; premise lines must be `=_A`-equal to a member of `S`.
/// Extension variables must lie outside the variables of `S`.
pub fn check_ef_s(p: &Proof, s: &[AlgebraElement], n: u32) -> Result<ProofStats, LineError> {
    run(
        p,
        Mode {
            premises: Some(Premises {
                n,
                tables: s.iter().map(AlgebraElement::table).collect(),
            }),
            dwphp: false,
        },
    )
}

/// Checks a WF proof: EF plus dual weak pigeonhole lines.
pub fn check_wf(p: &Proof) -> Result<ProofStats, LineError> {
    run(
        p,
        Mode {
            premises: None,
            dwphp: true,
        },
    )
}

pub fn check_wf_s(p: &Proof, s: &[AlgebraElement], n: u32) -> Result<ProofStats, LineError> {
    run(
        p,
        Mode {
            premises: Some(Premises {
                n,
                tables: s.iter().map(AlgebraElement::table).collect(),
            }),
            dwphp: true,
        },
    )
}

/// `c ≤_EF c2` as witnessed by `p`: an accepted EF proof whose conclusion is
/// `witness(c) → witness(c2)`.
pub fn leq_ef(c: &AlgebraElement, c2: &AlgebraElement, p: &Proof) -> Result<bool, LineError> {
    check_ef(p)?;
    let mut b = CircuitBuilder::new(0, 0);
    let x = b.import(c.witness());
    let y = b.import(c2.witness());
    let want = b.imp(x, y);
    Ok(b.import(p.conclusion().unwrap()) == want)
}

#[cfg(test)]
mod tests {
    use super::super::{Proof, ProofBuilder};
    use super::*;
    use crate::circuit::Circuit;

    fn k_proof() -> Proof {
        let mut pb = ProofBuilder::new(2);
        let (p, q) = (pb.b.var(0), pb.b.var(1));
        pb.axiom(Scheme::K, &[p, q]);
        pb.finish()
    }

    #[test]
    fn single_axiom() {
        assert_eq!(check_ef(&k_proof()).unwrap().lines, 1);
        let mut p = k_proof();
        p.lines[0].just = Justification::Axiom(Scheme::S);
        assert_eq!(check_ef(&p).unwrap_err().reason, Reject::BadInstance(Scheme::S));
        assert_eq!(check_ef(&Proof::default()).unwrap_err().reason, Reject::EmptyProof);
    }

    #[test]
    fn reflexivity_via_s_k() {
        // the textbook derivation of A -> A
        let mut pb = ProofBuilder::new(1);
        let a = pb.b.var(0);
        let aa = pb.b.imp(a, a);
        let l1 = pb.axiom(Scheme::S, &[a, aa, a]);
        let l2 = pb.axiom(Scheme::K, &[a, aa]);
        let l3 = pb.mp(l2, l1);
        let l4 = pb.axiom(Scheme::K, &[a, a]);
        pb.mp(l4, l3);
        let p = pb.finish();
        assert!(check_ef(&p).is_ok());
        let x = AlgebraElement::var(0, 1).unwrap();
        assert!(leq_ef(&x, &x, &p).unwrap());
        assert!(!leq_ef(&x, &x.complement(), &p).unwrap());
    }

    #[test]
    fn extension_freshness() {
        let mut pb = ProofBuilder::new(3);
        let (p0, p1) = (pb.b.var(0), pb.b.var(1));
        let d = pb.b.and(p0, p1);
        let e = pb.ext(2, d);
        let q = pb.b.var(2);
        let qd = pb.b.imp(q, d);
        let dq = pb.b.imp(d, q);
        let ax = pb.axiom(Scheme::AndE1, &[qd, dq]);
        pb.mp(e, ax);
        let bad = pb.finish();
        assert_eq!(check_ef(&bad).unwrap_err().reason, Reject::ExtInConclusion(2));
        pb.axiom(Scheme::True, &[]);
        assert!(check_ef(&pb.finish()).is_ok());

        let mut pb = ProofBuilder::new(2);
        let p0 = pb.b.var(0);
        pb.axiom(Scheme::OrI1, &[p0, p0]);
        let d = pb.b.not(p0);
        pb.ext(0, d);
        pb.axiom(Scheme::True, &[]);
        assert!(matches!(
            check_ef(&pb.finish()).unwrap_err().reason,
            Reject::NotFresh(0) | Reject::ExtInDefinition(0)
        ));
    }

    #[test]
    fn premises() {
        let x = AlgebraElement::var(0, 1).unwrap();
        let mut pb = ProofBuilder::new(1);
        let v = pb.b.var(0);
        pb.premise(v);
        let p = pb.finish();
        assert!(check_ef_s(&p, std::slice::from_ref(&x), 1).is_ok());
        assert_eq!(check_ef(&p).unwrap_err().reason, Reject::PremiseNotAllowed);
        assert_eq!(
            check_ef_s(&p, &[x.complement()], 1).unwrap_err().reason,
            Reject::PremiseNotInSet
        );
        // premises are compared semantically
        let mut pb = ProofBuilder::new(1);
        let v = pb.b.var(0);
        let vv = pb.b.and(v, v);
        pb.premise(vv);
        assert!(check_ef_s(&pb.finish(), &[x], 1).is_ok());
    }

    #[test]
    fn mp_references() {
        let mut p = k_proof();
        p.push(
            Circuit::var(0, 2),
            Justification::Mp {
                premise: 1,
                implication: 2,
            },
        );
        assert_eq!(check_ef(&p).unwrap_err().reason, Reject::DanglingReference(2));
    }

    fn dwphp(r: Vec<u32>, c: Vec<Circuit>, d: Vec<Circuit>) -> Proof {
        let params = DwphpParams {
            m: r.len(),
            n: 1,
            r,
            c,
            d,
            holes: vec![0],
        };
        let mut b = CircuitBuilder::new(4, 0);
        let node = params.build(&mut b);
        let mut p = Proof::default();
        p.push(b.finish(node).widened(4, 0), Justification::Dwphp(params));
        p
    }

    #[test]
    fn dwphp_side_conditions() {
        let c = || vec![Circuit::var(0, 4), Circuit::var(0, 4)];
        let ok = dwphp(vec![2, 3], c(), vec![Circuit::var(1, 4)]);
        assert!(check_wf(&ok).is_ok());
        assert_eq!(check_ef(&ok).unwrap_err().reason, Reject::DwphpNotAllowed);
        // r_0 inside C_0
        let bad = dwphp(
            vec![2, 3],
            vec![Circuit::var(2, 4), Circuit::var(0, 4)],
            vec![Circuit::var(1, 4)],
        );
        assert!(matches!(check_wf(&bad).unwrap_err().reason, Reject::DwphpSide(_)));
        // r_0 inside D only
        let ok = dwphp(vec![2, 3], c(), vec![Circuit::var(2, 4)]);
        assert!(check_wf(&ok).is_ok());
        // r_0 in an earlier line
        let mut late = k_proof();
        late.lines[0].circuit = late.lines[0].circuit.widened(4, 0);
        let tail = dwphp(vec![1, 3], c(), vec![Circuit::var(2, 4)]);
        late.lines.extend(tail.lines);
        assert!(matches!(
            check_wf(&late).unwrap_err(),
            LineError {
                line: 2,
                reason: Reject::DwphpSide(_)
            }
        ));
        let mut wrong = dwphp(vec![2, 3], c(), vec![Circuit::var(1, 4)]);
        wrong.lines[0].circuit = Circuit::var(2, 4);
        assert!(matches!(check_wf(&wrong).unwrap_err().reason, Reject::DwphpShape(_)));
        let short = dwphp(vec![2], vec![Circuit::var(0, 4)], vec![Circuit::var(1, 4)]);
        assert!(matches!(check_wf(&short).unwrap_err().reason, Reject::DwphpShape(_)));
    }
}
