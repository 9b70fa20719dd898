//! The acceptance battery: ten seeded experiments, each reporting its case
//! count, failures and wall time against a time limit.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Assignment, Circuit, CircuitBuilder, TruthTable};
use crate::corpus::{CORPUS, INDUCTION_CORPUS};
use crate::error::{Error, Result};
use crate::formula::{eval_standard, BitString, StrEnv};
use crate::generic::{consistent_set_to_ideal, forcing_check, ind_trichotomy_check, GenericFilter, InductionCase};
use crate::instances::{self as gen, FamilyKind};
use crate::limits::Limits;
use crate::mcv::{binary_search_witness, build_mcv_y, check_delta_mcv, cvp_values, WitnessProblem};
use crate::proof::{check_ef, check_wf, DwphpParams, Justification, Proof, ProofBuilder, Scheme};
use crate::random::{dwphp_range_experiment, eval_R, RandCircuit, TriBool};
use crate::translate::{translate_sigma_b0, BString};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    /// The first few failing cases.
    pub examples: Vec<String>,
    pub wall_time_ms: u64,
    pub limit_ms: u64,
    pub pass: bool,
}

pub const CRITERIA: [(u32, &str, u64); 10] = [
    (1, "translation agrees with standard evaluation", 30_000),
    (2, "forcing theorem at point generics", 60_000),
    (3, "Boolean algebra laws", 10_000),
    (4, "monotone circuit value", 60_000),
    (5, "binary-search witnessing", 60_000),
    (6, "dWPHP range counting", 60_000),
    (7, "eval_R thresholds and composition", 30_000),
    (8, "proof checkers", 120_000),
    (9, "consistent set to ideal", 30_000),
    (10, "induction trichotomy", 60_000),
];

#[derive(Default)]
struct Tally {
    cases: u64,
    failures: u64,
    examples: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < 5 {
                self.examples.push(what());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.failures += other.failures;
        self.examples.extend(other.examples);
        self.examples.truncate(5);
        self
    }
}

fn sub_seed(seed: u64, id: u32) -> u64 {
    seed ^ (id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn run_criterion(id: u32, seed: u64, limits: &Limits) -> Result<CriterionReport> {
    let &(_, name, limit_ms) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Invalid(format!("no acceptance criterion {id}")))?;
    let seed = sub_seed(seed, id);
    let start = Instant::now();
    let t = match id {
        1 => translation(limits)?,
        2 => forcing(seed, limits)?,
        3 => algebra_laws(seed)?,
        4 => mcv(seed, limits)?,
        5 => witnessing(seed, limits)?,
        6 => dwphp_counting(seed, limits)?,
        7 => thresholds(seed, limits)?,
        8 => proof_checkers(seed)?,
        9 => ideals(seed)?,
        _ => trichotomy(limits)?,
    };
    let wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(CriterionReport {
        id,
        name,
        cases: t.cases,
        failures: t.failures,
        examples: t.examples,
        wall_time_ms,
        limit_ms,
        pass: t.failures == 0 && t.cases > 0 && wall_time_ms <= limit_ms,
    })
}

pub fn run_suite(seed: u64, limits: &Limits) -> Result<Vec<CriterionReport>> {
    CRITERIA.iter().map(|c| run_criterion(c.0, seed, limits)).collect()
}

fn translation(limits: &Limits) -> Result<Tally> {
    let tallies = CORPUS
        .par_iter()
        .map(|entry| -> Result<Tally> {
            let (f, env) = (entry.formula()?, entry.env()?);
            let c = translate_sigma_b0(&f, &env, limits)?;
            let mut t = Tally::default();
            for a in Assignment::all(env.num_vars()) {
                let want = eval_standard(&f, &env.num_values, &env.strings_from(a.bits()), limits)?;
                t.check(c.eval(&a)? == want, || format!("{} at {a}", entry.text));
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge))
}

fn forcing(seed: u64, limits: &Limits) -> Result<Tally> {
    let tallies = CORPUS
        .par_iter()
        .enumerate()
        .map(|(k, entry)| -> Result<Tally> {
            let (f, env) = (entry.formula()?, entry.env()?);
            let mut t = Tally::default();
            let generic = env.generic_args()?;
            let mut rng = gen::rng(seed.wrapping_add(k as u64));
            let n = rng.gen_range(1..=4);
            let random: BTreeMap<String, BString> = env
                .str_bounds
                .iter()
                .map(|(x, &len)| (x.clone(), gen::random_bstring(&mut rng, n, len as usize)))
                .collect();
            for (args, n) in [(&generic, env.num_vars()), (&random, n)] {
                for g in GenericFilter::all(n) {
                    let v = forcing_check(&f, &env, args, &g, limits)?;
                    t.check(v.agree, || format!("{} at {}", entry.text, v.assignment));
                }
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge))
}

fn algebra_laws(seed: u64) -> Result<Tally> {
    let mut rng = gen::rng(seed);
    let mut t = Tally::default();
    for k in 0..1000 {
        let n = 8;
        let (x, y, z) = (
            gen::random_element(&mut rng, n),
            gen::random_element(&mut rng, n),
            gen::random_element(&mut rng, n),
        );
        let laws = [
            x.meet(&y.join(&z)?)? == x.meet(&y)?.join(&x.meet(&z)?)?,
            x.join(&y.meet(&z)?)? == x.join(&y)?.meet(&x.join(&z)?)?,
            x.meet(&y)?.complement() == x.complement().join(&y.complement())?,
            x.join(&y)?.complement() == x.complement().meet(&y.complement())?,
            x.meet(&x.complement())?.is_zero(),
            x.join(&x.complement())?.is_one(),
            x.meet(&x.join(&y)?)? == x,
            x.join(&x.meet(&y)?)? == x,
        ];
        t.check(laws.iter().all(|&b| b), || format!("triple {k}"));
    }
    Ok(t)
}

fn mcv(seed: u64, limits: &Limits) -> Result<Tally> {
    let mut rng = gen::rng(seed);
    let insts: Vec<_> = (0..100)
        .map(|_| {
            let a = rng.gen_range(2..=8);
            let n = rng.gen_range(1..=4);
            gen::random_mcv(&mut rng, a, n)
        })
        .collect();
    let tallies = insts
        .par_iter()
        .enumerate()
        .map(|(k, inst)| -> Result<Tally> {
            let mut t = Tally::default();
            let y = build_mcv_y(inst)?;
            t.check(check_delta_mcv(inst, &y, limits)?.is_one(), || {
                format!("instance {k}: delta not one")
            });
            for at in Assignment::all(inst.num_vars()) {
                let (c, e) = inst.decode(&at);
                let want = cvp_values(inst.a, &c, &e);
                let got: Vec<bool> = y.entries().iter().map(|v| v.at(&at)).collect();
                t.check(got == want, || format!("instance {k} at {at}"));
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge))
}

fn witnessing(seed: u64, limits: &Limits) -> Result<Tally> {
    let mut rng = gen::rng(seed);
    let mut t = Tally::default();
    for k in 0..50 {
        let matrix = gen::random_formula(&mut rng, &["X", "Z"], &["x"], 3);
        let tb = rng.gen_range(1..=8);
        let p = WitnessProblem::new(matrix, "Z", tb)?.at(rng.gen_range(0..4));
        let len = rng.gen_range(0..=3);
        let strs: StrEnv = [("X".to_string(), BitString::from_value(rng.gen(), len))].into();
        let all = p.enumerate_witnesses(&strs, limits)?;
        let found = binary_search_witness(&p, &strs, limits)?;
        t.check(found.as_ref() == all.first(), || format!("matrix {k}: {}", p.matrix));
    }
    Ok(t)
}

fn dwphp_counting(seed: u64, limits: &Limits) -> Result<Tally> {
    let mut rng = gen::rng(seed);
    let mut t = Tally::default();
    for a in 2..=4 {
        for k in 0..20 {
            let kind = [FamilyKind::Random, FamilyKind::Injective, FamilyKind::Constant][k % 3];
            let inst = gen::dwphp_family(&mut rng, a, kind);
            let m = rng.gen_range(0..=4);
            let r = dwphp_range_experiment(&inst, m, limits)?;
            t.check(r.pass && r.injective == (r.p_prime == r.bound), || {
                format!("a={a} family {k}: |P'|={} range={}", r.p_prime, r.range_size)
            });
        }
    }
    let inj = gen::dwphp_family(&mut rng, 2, FamilyKind::Injective);
    let r = dwphp_range_experiment(&inj, 0, limits)?;
    t.check(r.p_prime == 48 && r.fraction == 0.75, || {
        format!("a=2 injective: |P'|={}", r.p_prime)
    });
    Ok(t)
}

/// `eval_R` recomputed by looping over every random assignment.
fn brute_eval_r(c: &RandCircuit, a: &Assignment) -> TriBool {
    let m = c.num_rand();
    let mut inputs = a.bits().to_vec();
    for b in c.blocks() {
        let count = (0..1u64 << m)
            .filter(|z| {
                let zs: Vec<bool> = (0..m).map(|i| z >> i & 1 == 1).collect();
                b.eval_with(a.bits(), &zs)
            })
            .count() as u64;
        let total = 1u64 << m;
        if 4 * count >= 3 * total {
            inputs.push(true);
        } else if 4 * count <= total {
            inputs.push(false);
        } else {
            return TriBool::Undefined;
        }
    }
    if c.outer().eval_with(&inputs, &[]) {
        TriBool::One
    } else {
        TriBool::Zero
    }
}

fn thresholds(seed: u64, limits: &Limits) -> Result<Tally> {
    let mut t = Tally::default();
    let mut b = CircuitBuilder::new(1, 2);
    let (z0, z1) = (b.rvar(0), b.rvar(1));
    let or = b.or(z0, z1);
    let and = b.and(z0, z1);
    let a = Assignment::from_bits(vec![false]);
    for (node, want) in [(or, TriBool::One), (and, TriBool::Zero), (z0, TriBool::Undefined)] {
        let c = RandCircuit::block(b.finish(node).widened(1, 2), 1, 2)?;
        let got = eval_R(&c, &a, limits)?;
        t.check(got == want, || format!("boundary case: expected {want}, got {got}"));
    }
    let mut rng = gen::rng(seed);
    let circuits: Vec<RandCircuit> = (0..50)
        .map(|_| {
            let m = rng.gen_range(0..=10);
            let blocks = rng.gen_range(1..=3);
            gen::random_rand_circuit(&mut rng, 3, m, blocks)
        })
        .collect();
    let tallies = circuits
        .par_iter()
        .enumerate()
        .map(|(k, c)| -> Result<Tally> {
            let mut t = Tally::default();
            for a in Assignment::all(3) {
                let got = eval_R(c, &a, limits)?;
                t.check(got == brute_eval_r(c, &a), || format!("composite {k} at {a}"));
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tallies.into_iter().fold(t, Tally::merge))
}

/// Hand-built WF proofs with the expected verdict.
pub fn wf_cases() -> Vec<(&'static str, Proof, bool)> {
    fn line(r: Vec<u32>, c: Vec<Circuit>, d: Vec<Circuit>, n: usize, holes: Vec<u32>) -> (DwphpParams, Circuit) {
        let params = DwphpParams {
            m: r.len(),
            n,
            r,
            c,
            d,
            holes,
        };
        let mut b = CircuitBuilder::new(6, 0);
        let node = params.build(&mut b);
        let c = b.finish(node).widened(6, 0);
        (params, c)
    }
    fn single(params: DwphpParams, c: Circuit) -> Proof {
        let mut p = Proof::default();
        p.push(c, Justification::Dwphp(params));
        p
    }
    let v = |k| Circuit::var(k, 6);
    let neg = {
        let mut b = CircuitBuilder::new(6, 0);
        let x = b.var(0);
        let nx = b.not(x);
        b.finish(nx).widened(6, 0)
    };
    let mut cases = Vec::new();
    let (p, c) = line(vec![2, 3], vec![v(0), neg.clone()], vec![v(1)], 1, vec![0]);
    cases.push(("fresh r, m=2 n=1", single(p, c), true));
    let (p, c) = line(
        vec![3, 4, 5],
        vec![v(0), v(1), neg.clone()],
        vec![v(2), v(2)],
        2,
        vec![0, 1],
    );
    cases.push(("fresh r, m=3 n=2", single(p, c), true));
    let (p, c) = line(vec![2, 3], vec![v(0), v(0)], vec![v(2)], 1, vec![0]);
    cases.push(("r inside D", single(p, c), true));
    let (p, c) = line(vec![2, 3], vec![v(2), v(0)], vec![v(1)], 1, vec![0]);
    cases.push(("r_0 inside C_0", single(p, c), false));
    let (p, c) = line(vec![2, 3], vec![v(0), v(2)], vec![v(1)], 1, vec![0]);
    cases.push(("r_0 inside C_1", single(p, c), false));
    let (p, c) = line(vec![2, 2], vec![v(0), v(0)], vec![v(1)], 1, vec![0]);
    cases.push(("repeated r", single(p, c), false));
    let (p, c) = line(vec![0, 3], vec![v(0), v(0)], vec![v(1)], 1, vec![0]);
    cases.push(("r is a hole", single(p, c), false));
    let (p, c) = line(vec![2], vec![v(0)], vec![v(1)], 1, vec![0]);
    cases.push(("n not below m", single(p, c), false));
    let (p, _) = line(vec![2, 3], vec![v(0), v(0)], vec![v(1)], 1, vec![0]);
    let (_, swapped) = line(vec![3, 2], vec![v(0), v(0)], vec![v(1)], 1, vec![0]);
    cases.push(("circuit differs from parameters", single(p, swapped), false));
    let mut pb = ProofBuilder::new(6);
    let (x, r) = (pb.b.var(0), pb.b.var(2));
    pb.axiom(Scheme::K, &[x, r]);
    let mut early = pb.finish();
    let (p, c) = line(vec![2, 3], vec![v(0), v(0)], vec![v(1)], 1, vec![0]);
    early.push(c, Justification::Dwphp(p));
    cases.push(("r in an earlier line", early, false));
    let mut pb = ProofBuilder::new(6);
    let (x, y) = (pb.b.var(0), pb.b.var(1));
    pb.axiom(Scheme::K, &[x, y]);
    let mut later = pb.finish();
    let (p, c) = line(vec![2, 3], vec![v(0), v(0)], vec![v(1)], 1, vec![0]);
    later.push(c, Justification::Dwphp(p));
    cases.push(("r only after unrelated lines", later, true));
    cases
}

fn proof_checkers(seed: u64) -> Result<Tally> {
    let mut rng = gen::rng(seed);
    let proofs: Vec<Proof> = (0..1000)
        .map(|_| {
            let base = rng.gen_range(2..=6);
            let exts = rng.gen_range(0..=(10 - base).min(4));
            let steps = rng.gen_range(3..=14);
            gen::random_ef_proof(&mut rng, base, exts, steps)
        })
        .collect();
    let mutants: Vec<Proof> = proofs.iter().map(|p| gen::mutate_proof(&mut rng, p).0).collect();
    let valid = proofs
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let mut t = Tally::default();
            let ok = check_ef(p).is_ok()
                && p.conclusion()
                    .and_then(|c| c.truth_table(p.num_vars()).ok())
                    .is_some_and(|t| t.is_one());
            t.check(ok, || format!("valid proof {k} rejected"));
            t
        })
        .reduce(Tally::default, Tally::merge);
    let bad = mutants
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let mut t = Tally::default();
            t.check(check_ef(p).is_err(), || format!("mutant {k} accepted"));
            t
        })
        .reduce(Tally::default, Tally::merge);
    let mut wf = Tally::default();
    for (name, p, accept) in wf_cases() {
        wf.check(check_wf(&p).is_ok() == accept, || format!("WF case {name:?}"));
    }
    Ok(valid.merge(bad).merge(wf))
}

fn ideals(seed: u64) -> Result<Tally> {
    let mut rng = gen::rng(seed);
    let mut t = Tally::default();
    for k in 0..100 {
        let n = rng.gen_range(1..=3);
        let size = rng.gen_range(1..=4);
        let set = gen::random_consistent_set(&mut rng, n, size);
        let ideal = consistent_set_to_ideal(&set, n)?;
        let width = 1u32 << n;
        let all: Vec<TruthTable> = (0..1u64 << width)
            .map(|mask| TruthTable::from_fn(n, |i| mask >> i & 1 == 1))
            .collect();
        let inside: Vec<bool> = all.iter().map(|x| ideal.contains_table(x)).collect();
        let mut ok = inside[0] && !inside[all.len() - 1];
        for (i, x) in all.iter().enumerate() {
            for (j, y) in all.iter().enumerate() {
                if inside[i] && y.leq(x)? && !inside[j] {
                    ok = false;
                }
                if inside[i] && inside[j] && !ideal.contains_table(&x.or(y)?) {
                    ok = false;
                }
            }
        }
        for atom in ideal.atoms_outside() {
            ok &= set.iter().all(|s| GenericFilter::at(atom.clone()).contains(s));
        }
        t.check(ok, || format!("set {k} over {n} variables"));
    }
    Ok(t)
}

fn trichotomy(limits: &Limits) -> Result<Tally> {
    let mut t = Tally::default();
    for entry in INDUCTION_CORPUS {
        let p = entry.problem()?;
        let env = entry.env()?;
        let args = env.generic_args()?;
        let n = env.num_vars();
        for g in GenericFilter::all(n) {
            let report = ind_trichotomy_check(&p, &env, &args, &g, limits)?;
            let strs = env.strings_from(g.atom().bits());
            let mut profile = Vec::new();
            for v in 0..=p.a {
                let mut nums = env.num_values.clone();
                nums.insert(p.x.clone(), v);
                let mut any = false;
                'outer: for len in 0..p.t as usize {
                    for w in 0..1u64 << len {
                        let mut s = strs.clone();
                        s.insert(p.z.clone(), BitString::from_value(w, len));
                        if eval_standard(&p.matrix, &nums, &s, limits)? {
                            any = true;
                            break 'outer;
                        }
                    }
                }
                profile.push(any);
            }
            let valid = report.cases.iter().all(|c| match *c {
                InductionCase::A => !profile[0],
                InductionCase::B => profile[p.a as usize],
                InductionCase::C { x } => profile[x as usize] && !profile[x as usize + 1],
            });
            t.check(
                !report.cases.is_empty() && valid && report.boolean_agrees && report.profile == profile,
                || format!("{} at {}", entry.matrix, g.atom()),
            );
        }
    }
    Ok(t)
}
