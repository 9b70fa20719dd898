//! Seeded instance generators. Every generator draws from a caller-supplied
//! `ChaCha8Rng`, so a seed fixes the whole run.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{circuit_from_table, AlgebraElement, Circuit, CircuitBuilder, NodeId, TruthTable};
use crate::error::Result;
use crate::formula::{Formula, Term};
use crate::mcv::MCVInstance;
use crate::proof::{Justification, Proof, ProofBuilder, Scheme};
use crate::random::{DwphpInstance, RandCircuit};
use crate::translate::{BString, CircuitFamily};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random node over `leaves` with about `gates` gates.
pub fn random_node(rng: &mut ChaCha8Rng, b: &mut CircuitBuilder, leaves: &[NodeId], gates: usize) -> NodeId {
    let mut pool = leaves.to_vec();
    if pool.is_empty() {
        pool.push(b.constant(rng.gen()));
    }
    let mut last = *pool.choose(rng).unwrap();
    for _ in 0..gates {
        let x = *pool.choose(rng).unwrap();
        let y = *pool.choose(rng).unwrap();
        last = match rng.gen_range(0..3) {
            0 => b.not(x),
            1 => b.and(x, y),
            _ => b.or(x, y),
        };
        pool.push(last);
    }
    last
}

/// A random circuit over `n` inputs and `m` random variables.
pub fn random_circuit(rng: &mut ChaCha8Rng, n: u32, m: u32, gates: usize) -> Circuit {
    let mut b = CircuitBuilder::new(n, m);
    let mut leaves: Vec<NodeId> = (0..n).map(|k| b.var(k)).collect();
    leaves.extend((0..m).map(|k| b.rvar(k)));
    let root = random_node(rng, &mut b, &leaves, gates);
    b.finish(root).widened(n, m)
}

pub fn random_table(rng: &mut ChaCha8Rng, n: u32) -> TruthTable {
    let bits: Vec<bool> = (0..1usize << n).map(|_| rng.gen()).collect();
    TruthTable::from_fn(n, |i| bits[i])
}

/// A random element whose witness is a random circuit.
pub fn random_element(rng: &mut ChaCha8Rng, n: u32) -> AlgebraElement {
    let gates = rng.gen_range(1..=2 * n as usize + 2);
    AlgebraElement::from_circuit(random_circuit(rng, n, 0, gates), n).expect("arity matches")
}

pub fn random_bstring(rng: &mut ChaCha8Rng, n: u32, len: usize) -> BString {
    BString::new(n, (0..len).map(|_| random_element(rng, n)).collect()).expect("arity matches")
}

pub fn random_mcv(rng: &mut ChaCha8Rng, a: usize, n: u32) -> MCVInstance {
    let c = random_bstring(rng, n, a);
    let e = random_bstring(rng, n, a * a);
    MCVInstance::new(a, c, e).expect("well-formed instance")
}

fn random_term(rng: &mut ChaCha8Rng, strs: &[&str], nums: &[String], depth: u32) -> Term {
    let leafy = depth == 0 || rng.gen_bool(0.6);
    if leafy {
        match rng.gen_range(0..4) {
            0 if !nums.is_empty() => Term::var(nums.choose(rng).unwrap()),
            1 if !strs.is_empty() => Term::Len(strs.choose(rng).unwrap().to_string()),
            2 => Term::Zero,
            _ => Term::Num(rng.gen_range(1..4)),
        }
    } else {
        let (x, y) = (
            random_term(rng, strs, nums, depth - 1),
            random_term(rng, strs, nums, depth - 1),
        );
        match rng.gen_range(0..3) {
            0 => Term::Succ(Box::new(x)),
            1 => Term::Plus(Box::new(x), Box::new(y)),
            _ => Term::Times(Box::new(x), Box::new(y)),
        }
    }
}

fn formula_rec(rng: &mut ChaCha8Rng, strs: &[&str], nums: &mut Vec<String>, depth: u32, fresh: &mut u32) -> Formula {
    let choice = if depth == 0 {
        rng.gen_range(0..3)
    } else {
        rng.gen_range(0..9)
    };
    match choice {
        0 if !strs.is_empty() => {
            Formula::Member(strs.choose(rng).unwrap().to_string(), random_term(rng, strs, nums, 1))
        }
        0 | 1 => Formula::Leq(random_term(rng, strs, nums, 1), random_term(rng, strs, nums, 1)),
        2 => Formula::Eq(random_term(rng, strs, nums, 1), random_term(rng, strs, nums, 1)),
        3 => Formula::not(formula_rec(rng, strs, nums, depth - 1, fresh)),
        4..=6 => {
            let x = formula_rec(rng, strs, nums, depth - 1, fresh);
            let y = formula_rec(rng, strs, nums, depth - 1, fresh);
            match choice {
                4 => Formula::and(x, y),
                5 => Formula::or(x, y),
                _ => Formula::imp(x, y),
            }
        }
        _ => {
            let name = format!("i{fresh}");
            *fresh += 1;
            let bound = if !strs.is_empty() && rng.gen_bool(0.5) {
                Term::Len(strs.choose(rng).unwrap().to_string())
            } else {
                match rng.gen_range(0..=4) {
                    0 => Term::Zero,
                    k => Term::Num(k),
                }
            };
            nums.push(name.clone());
            let body = formula_rec(rng, strs, nums, depth - 1, fresh);
            nums.pop();
            if rng.gen() {
                Formula::ForallNum(name, bound, Box::new(body))
            } else {
                Formula::ExistsNum(name, bound, Box::new(body))
            }
        }
    }
}

/// A random Σ^B_0 formula over the given free strings and numbers, with
/// bounded number quantifiers only.
pub fn random_formula(rng: &mut ChaCha8Rng, strs: &[&str], nums: &[&str], depth: u32) -> Formula {
    let mut scope: Vec<String> = nums.iter().map(|s| s.to_string()).collect();
    let mut fresh = 0;
    formula_rec(rng, strs, &mut scope, depth, &mut fresh)
}

/// Letters for axiom instances: small random nodes over `leaves`.
fn letter(rng: &mut ChaCha8Rng, b: &mut CircuitBuilder, leaves: &[NodeId]) -> NodeId {
    let gates = rng.gen_range(0..3);
    random_node(rng, b, leaves, gates)
}

/// A valid EF proof over `base` variables plus `exts` extension variables.
/// Extension variables are introduced at random positions and never reach
/// the conclusion.
pub fn random_ef_proof(rng: &mut ChaCha8Rng, base: u32, exts: u32, steps: usize) -> Proof {
    let n = base + exts;
    let mut pb = ProofBuilder::new(n);
    let base_leaves: Vec<NodeId> = (0..base).map(|k| pb.b.var(k)).collect();
    let mut leaves = base_leaves.clone();
    let mut next_ext = base;
    for _ in 0..steps {
        match rng.gen_range(0..6) {
            0 if next_ext < n => {
                let d = letter(rng, &mut pb.b, &leaves);
                pb.ext(next_ext, d);
                leaves.push(pb.b.var(next_ext));
                next_ext += 1;
            }
            1 => {
                let s = *Scheme::ALL.choose(rng).unwrap();
                let args: Vec<NodeId> = (0..s.arity()).map(|_| letter(rng, &mut pb.b, &leaves)).collect();
                pb.axiom(s, &args);
            }
            2 if pb.len() >= 2 => {
                let (i, j) = (rng.gen_range(1..=pb.len()), rng.gen_range(1..=pb.len()));
                let (a, x) = (pb.node(i), pb.node(j));
                let both = pb.axiom(Scheme::AndI, &[a, x]);
                let rest = pb.mp(i, both);
                pb.mp(j, rest);
            }
            3 => {
                let mp = (1..=pb.len()).find_map(|k| {
                    let (x, _) = pb.split_imp(pb.node(k))?;
                    (1..=pb.len()).find(|&i| pb.node(i) == x).map(|i| (i, k))
                });
                match mp {
                    Some((i, k)) if rng.gen_bool(0.7) => {
                        pb.mp(i, k);
                    }
                    _ => {
                        pb.axiom(Scheme::True, &[]);
                    }
                }
            }
            _ if !pb.is_empty() => {
                let i = rng.gen_range(1..=pb.len());
                let x = letter(rng, &mut pb.b, &leaves);
                let k = pb.axiom(Scheme::K, &[pb.node(i), x]);
                pb.mp(i, k);
            }
            _ => {
                pb.axiom(Scheme::False, &[]);
            }
        }
    }
    let a = letter(rng, &mut pb.b, &base_leaves);
    if rng.gen() {
        let aa = pb.b.imp(a, a);
        let s = pb.axiom(Scheme::S, &[a, aa, a]);
        let k1 = pb.axiom(Scheme::K, &[a, aa]);
        let m1 = pb.mp(k1, s);
        let k2 = pb.axiom(Scheme::K, &[a, a]);
        pb.mp(k2, m1);
    } else {
        let t = pb.axiom(Scheme::True, &[]);
        let one = pb.node(t);
        let k = pb.axiom(Scheme::K, &[one, a]);
        pb.mp(t, k);
    }
    pb.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// The line's circuit replaced by its negation.
    Negate { line: usize },
    /// One reference of an MP line pointed at a structurally different line.
    Redirect { line: usize, to: usize },
}

/// A single-line mutant of `p`.
pub fn mutate_proof(rng: &mut ChaCha8Rng, p: &Proof) -> (Proof, Mutation) {
    let mut q = p.clone();
    let mps: Vec<usize> = (0..p.len())
        .filter(|&k| matches!(p.lines[k].just, Justification::Mp { .. }))
        .collect();
    if !mps.is_empty() && rng.gen_bool(0.5) {
        let k = *mps.choose(rng).unwrap();
        if let Justification::Mp { premise, implication } = p.lines[k].just {
            let target = if rng.gen() { premise } else { implication };
            let others: Vec<usize> = (1..=k)
                .filter(|&j| !p.lines[j - 1].circuit.same_structure(&p.lines[target - 1].circuit))
                .collect();
            if let Some(&to) = others.choose(rng) {
                q.lines[k].just = if target == premise {
                    Justification::Mp {
                        premise: to,
                        implication,
                    }
                } else {
                    Justification::Mp {
                        premise,
                        implication: to,
                    }
                };
                return (q, Mutation::Redirect { line: k + 1, to });
            }
        }
    }
    let k = rng.gen_range(0..p.len());
    let c = &p.lines[k].circuit;
    let mut b = CircuitBuilder::new(c.num_inputs(), 0);
    let x = b.import(c);
    let nx = b.not(x);
    q.lines[k].circuit = b.finish(nx).widened(c.num_inputs(), 0);
    (q, Mutation::Negate { line: k + 1 })
}

fn family_from(a: u32, f: impl Fn(u64) -> u64) -> DwphpInstance {
    let circuits = (0..2 * a)
        .map(|i| circuit_from_table(&TruthTable::from_fn(a, |x| f(x as u64) >> i & 1 == 1)))
        .collect();
    DwphpInstance::new(a, CircuitFamily::new(a, circuits).expect("arity matches")).expect("valid family")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Random,
    Injective,
    Constant,
}

impl std::str::FromStr for FamilyKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(FamilyKind::Random),
            "injective" => Ok(FamilyKind::Injective),
            "constant" => Ok(FamilyKind::Constant),
            _ => Err(crate::Error::Invalid(format!("unknown family {s:?}"))),
        }
    }
}

/// `F : 2^a → 2^{2a}` of the requested kind. Injective families put `X` in
/// the low half and random bits above it.
pub fn dwphp_family(rng: &mut ChaCha8Rng, a: u32, kind: FamilyKind) -> DwphpInstance {
    let mask = (1u64 << (2 * a)) - 1;
    match kind {
        FamilyKind::Random => {
            let table: Vec<u64> = (0..1u64 << a).map(|_| rng.gen::<u64>() & mask).collect();
            family_from(a, |x| table[x as usize])
        }
        FamilyKind::Injective => {
            let high: Vec<u64> = (0..1u64 << a).map(|_| rng.gen::<u64>() & ((1 << a) - 1)).collect();
            family_from(a, |x| x | high[x as usize] << a)
        }
        FamilyKind::Constant => {
            let y = rng.gen::<u64>() & mask;
            family_from(a, |_| y)
        }
    }
}

/// A composite randomized circuit with `blocks` blocks over `n` inputs and
/// `m` shared random variables.
pub fn random_rand_circuit(rng: &mut ChaCha8Rng, n: u32, m: u32, blocks: usize) -> RandCircuit {
    let bs = (0..blocks)
        .map(|_| {
            let gates = rng.gen_range(1..=6);
            random_circuit(rng, n, m, gates)
        })
        .collect();
    let gates = rng.gen_range(1..=4);
    let outer = random_circuit(rng, n + blocks as u32, 0, gates);
    RandCircuit::composite(outer, bs, n, m).expect("well-formed composite")
}

/// A set whose meet is nonzero: every member lies above one random atom.
pub fn random_consistent_set(rng: &mut ChaCha8Rng, n: u32, size: usize) -> Vec<AlgebraElement> {
    let atom = rng.gen_range(0..1usize << n);
    (0..size)
        .map(|_| {
            let mut t = random_table(rng, n);
            t.set(atom, true);
            AlgebraElement::from_table(t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::FormulaClass;
    use crate::proof::check_ef;

    #[test]
    fn generators_are_deterministic() {
        let a = random_ef_proof(&mut rng(5), 3, 2, 12);
        let b = random_ef_proof(&mut rng(5), 3, 2, 12);
        assert_eq!(crate::proof::write_proof(&a), crate::proof::write_proof(&b));
        let f = random_formula(&mut rng(9), &["X"], &["x"], 3);
        assert_eq!(f, random_formula(&mut rng(9), &["X"], &["x"], 3));
        assert_eq!(f.classify(), FormulaClass::SigmaB0);
    }

    #[test]
    fn generated_proofs_check_and_mutants_fail() {
        let mut r = rng(1);
        for _ in 0..30 {
            let p = random_ef_proof(&mut r, 3, 2, 10);
            assert!(check_ef(&p).is_ok(), "{}", crate::proof::write_proof(&p).0);
            let (m, _) = mutate_proof(&mut r, &p);
            assert!(check_ef(&m).is_err());
        }
    }

    #[test]
    fn families_have_the_requested_shape() {
        let lim = crate::Limits::default();
        let mut r = rng(2);
        let inj = dwphp_family(&mut r, 3, FamilyKind::Injective);
        let rep = crate::random::dwphp_range_experiment(&inj, 0, &lim).unwrap();
        assert!(rep.injective);
        let c = dwphp_family(&mut r, 3, FamilyKind::Constant);
        assert_eq!(
            crate::random::dwphp_range_experiment(&c, 0, &lim).unwrap().range_size,
            1
        );
        let s = random_consistent_set(&mut r, 3, 5);
        assert!(!AlgebraElement::meet_all(3, &s).unwrap().is_zero());
    }
}
