use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bvlab_core::circuit::{parse_circuit, parse_dag, AlgebraElement, Assignment, Circuit, CircuitDag};
use bvlab_core::formula::{eval_standard, parse};
use bvlab_core::generic::{forcing_check, i_g, GenericFilter};
use bvlab_core::instances::{self as gen, FamilyKind};
use bvlab_core::mcv::{
    binary_search_witness, build_mcv_y, check_delta_mcv, cvp_values, witness_family, WitnessProblem,
};
use bvlab_core::proof::{
    check_ef, check_ef_s, check_wf, l_consistent, parse_proof, ConsistencyVerdict, LineError, Proof, ProofStats,
    SearchLimits,
};
use bvlab_core::random::{
    block_values, dwphp_range_experiment, dwphp_surjection_set, eval_R, RandCircuit, SurjectionOutcome, TriBool,
};
use bvlab_core::suite::run_suite;
use bvlab_core::translate::{bool_value, translate_sigma_b0, BString, TranslationEnv};
use bvlab_core::Limits;
use rand::Rng;
use serde_json::json;

use crate::report::Record;
use crate::Command;

pub fn run(cmd: &Command, seed: u64, limits: &Limits) -> Result<Vec<Record>> {
    match cmd {
        Command::Parse { formula } => parse_cmd(formula),
        Command::Translate { formula, bounds } => translate(formula, bounds, limits),
        Command::Bval { formula, bounds, n } => bval(formula, bounds, *n, seed, limits),
        Command::ForceCheck { formula, bounds, n } => force_check(formula, bounds, *n, seed, limits),
        Command::Mcv { a, n, count } => mcv(*a, *n, *count, seed, limits),
        Command::Witness {
            matrix,
            bounds,
            z,
            t,
            x,
        } => witness(matrix, bounds, z, *t, *x, limits),
        Command::EfCheck { proof, circuits } => {
            let p = load_proof(proof, circuits.as_deref())?;
            Ok(vec![proof_record("ef-check", check_ef(&p))])
        }
        Command::EfsCheck {
            proof,
            circuits,
            premises,
        } => {
            let p = load_proof(proof, circuits.as_deref())?;
            let (s, n) = load_premises(premises, limits)?;
            Ok(vec![proof_record("efs-check", check_ef_s(&p, &s, n))])
        }
        Command::WfCheck { proof, circuits } => {
            let p = load_proof(proof, circuits.as_deref())?;
            Ok(vec![proof_record("wf-check", check_wf(&p))])
        }
        Command::Consistency { premises, l } => consistency(premises, *l, limits),
        Command::Randeval {
            circuit,
            require_resolved,
        } => randeval(circuit, *require_resolved, limits),
        Command::DwphpRange { a, family, m } => dwphp_range(*a, family, *m, seed, limits),
        Command::DwphpEmbed { m, n, c, d } => dwphp_embed(*m, *n, c.as_deref(), d.as_deref(), seed, limits),
        Command::Suite => Ok(run_suite(seed, limits)?
            .into_iter()
            .map(|r| Record::new(format!("criterion-{}", r.id), r.pass, serde_json::to_value(&r).unwrap()))
            .collect()),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_cmd(text: &str) -> Result<Vec<Record>> {
    let f = parse(text)?;
    let class = f.classify();
    let ast = format!("{f:#?}");
    Ok(vec![Record::new(
        "parse",
        true,
        json!({ "formula": f.to_string(), "class": class, "ast": ast }),
    )
    .with_text(ast)])
}

fn translate(text: &str, bounds: &str, limits: &Limits) -> Result<Vec<Record>> {
    let f = parse(text)?;
    let env = TranslationEnv::parse_bounds(bounds)?;
    let c = translate_sigma_b0(&f, &env, limits)?;
    limits.check_vars(env.num_vars())?;
    let mut mismatches = Vec::new();
    for a in Assignment::all(env.num_vars()) {
        let want = eval_standard(&f, &env.num_values, &env.strings_from(a.bits()), limits)?;
        if c.eval(&a)? != want {
            mismatches.push(a.to_string());
        }
    }
    let text = c.to_text();
    Ok(vec![Record::new(
        "translate",
        mismatches.is_empty(),
        json!({
            "formula": f.to_string(),
            "bounds": env.to_string(),
            "vars": env.num_vars(),
            "size": c.size(),
            "mismatches": mismatches,
            "circuit": text,
        }),
    )
    .with_text(text)])
}

/// Generic strings (each bit its own variable) or seeded random strings over `n` variables.
fn string_args(env: &TranslationEnv, n: Option<u32>, seed: u64) -> Result<(BTreeMap<String, BString>, u32)> {
    match n {
        None => Ok((env.generic_args()?, env.num_vars())),
        Some(n) => {
            let mut rng = gen::rng(seed);
            let args = env
                .str_bounds
                .iter()
                .map(|(x, &len)| (x.clone(), gen::random_bstring(&mut rng, n, len as usize)))
                .collect();
            Ok((args, n))
        }
    }
}

fn bval(text: &str, bounds: &str, n: Option<u32>, seed: u64, limits: &Limits) -> Result<Vec<Record>> {
    let f = parse(text)?;
    let env = TranslationEnv::parse_bounds(bounds)?;
    let (args, n) = string_args(&env, n, seed)?;
    limits.check_vars(n)?;
    let v = bool_value(&f, &env, &args, n, limits)?;
    let strings: BTreeMap<&String, Vec<String>> = args
        .iter()
        .map(|(k, s)| (k, s.entries().iter().map(|e| e.table().to_string()).collect()))
        .collect();
    Ok(vec![Record::new(
        "bval",
        true,
        json!({
            "formula": f.to_string(),
            "vars": n,
            "strings": strings,
            "table": v.table().to_string(),
            "witness_size": v.witness().size(),
        }),
    )])
}

fn force_check(text: &str, bounds: &str, n: Option<u32>, seed: u64, limits: &Limits) -> Result<Vec<Record>> {
    let f = parse(text)?;
    let env = TranslationEnv::parse_bounds(bounds)?;
    let (args, n) = string_args(&env, n, seed)?;
    limits.check_vars(n)?;
    GenericFilter::all(n)
        .map(|g| {
            let v = forcing_check(&f, &env, &args, &g, limits)?;
            Ok(Record::new(
                format!("G@{}", g.atom()),
                v.agree,
                serde_json::to_value(&v)?,
            ))
        })
        .collect()
}

fn mcv(a: usize, n: u32, count: usize, seed: u64, limits: &Limits) -> Result<Vec<Record>> {
    if a < 2 {
        bail!("--a must be at least 2");
    }
    limits.check_vars(n)?;
    let mut rng = gen::rng(seed);
    (0..count)
        .map(|k| {
            let inst = gen::random_mcv(&mut rng, a, n);
            let y = build_mcv_y(&inst)?;
            let delta = check_delta_mcv(&inst, &y, limits)?.is_one();
            let mut mismatches = Vec::new();
            for g in GenericFilter::all(n) {
                let (c, e) = inst.decode(g.atom());
                if i_g(&y, &g)?.bits() != cvp_values(a, &c, &e).as_slice() {
                    mismatches.push(g.atom().to_string());
                }
            }
            let size: usize = y.entries().iter().map(|e| e.witness().size()).sum();
            Ok(Record::new(
                format!("instance-{k}"),
                delta && mismatches.is_empty(),
                json!({ "a": a, "n": n, "delta_is_one": delta, "mismatches": mismatches, "y_size": size }),
            ))
        })
        .collect()
}

fn witness(matrix: &str, bounds: &str, z: &str, t: u64, x: u64, limits: &Limits) -> Result<Vec<Record>> {
    let p = WitnessProblem::new(parse(matrix)?, z, t)?.at(x);
    let env = TranslationEnv::parse_bounds(bounds)?;
    limits.check_vars(env.num_vars())?;
    let family = witness_family(&p, &env, limits)?;
    Assignment::all(env.num_vars())
        .map(|a| {
            let strs = env.strings_from(a.bits());
            let found = binary_search_witness(&p, &strs, limits)?;
            let first = p.enumerate_witnesses(&strs, limits)?.into_iter().next();
            let out = family.eval(a.bits());
            let from_family = (!out[t as usize - 1]).then(|| out[..t as usize - 1].to_vec());
            // the family pads the least witness with zeros
            let padded = found.as_ref().map(|w| {
                let mut bits = w.bits().to_vec();
                bits.resize(t as usize - 1, false);
                bits
            });
            let ok = found == first && from_family == padded;
            Ok(Record::new(
                format!("A={a}"),
                ok,
                json!({ "witness": found.map(|w| w.to_string()), "enumerated": first.map(|w| w.to_string()) }),
            ))
        })
        .collect()
}

fn circuits_path(proof: &Path, circuits: Option<&Path>) -> PathBuf {
    circuits
        .map(Path::to_path_buf)
        .unwrap_or_else(|| proof.with_extension("circ"))
}

fn load_proof(proof: &Path, circuits: Option<&Path>) -> Result<Proof> {
    let dag = parse_dag(&read(&circuits_path(proof, circuits))?)?;
    Ok(parse_proof(&read(proof)?, &dag)?)
}

fn outputs(dag: &CircuitDag) -> Result<Vec<Circuit>> {
    Ok(dag
        .outputs
        .iter()
        .map(|&id| dag.circuit(id))
        .collect::<bvlab_core::Result<_>>()?)
}

fn load_premises(path: &Path, limits: &Limits) -> Result<(Vec<AlgebraElement>, u32)> {
    let dag = parse_dag(&read(path)?)?;
    let n = dag.num_inputs;
    limits.check_vars(n)?;
    let s = outputs(&dag)?
        .into_iter()
        .map(|c| AlgebraElement::from_circuit_within(c, n, limits))
        .collect::<bvlab_core::Result<_>>()?;
    Ok((s, n))
}

fn proof_record(name: &str, r: std::result::Result<ProofStats, LineError>) -> Record {
    match r {
        Ok(stats) => Record::new(name, true, json!({ "accepted": true, "stats": stats })),
        Err(e) => Record::new(
            name,
            false,
            json!({ "accepted": false, "line": e.line, "reason": format!("{:?}", e.reason) }),
        ),
    }
}

fn consistency(premises: &Path, l: usize, limits: &Limits) -> Result<Vec<Record>> {
    let (s, n) = load_premises(premises, limits)?;
    let search = SearchLimits {
        max_lines: SearchLimits::default().max_lines.min(limits.max_expansion as usize),
        ..SearchLimits::default()
    };
    let (pass, detail) = match l_consistent(&s, l, n, &search)? {
        ConsistencyVerdict::Consistent(a) => (true, json!({ "verdict": "consistent", "model": a.to_string() })),
        ConsistencyVerdict::Inconsistent(p) => (
            false,
            json!({ "verdict": "inconsistent", "lines": p.len(), "total_size": p.total_size() }),
        ),
        ConsistencyVerdict::Unknown => (true, json!({ "verdict": "unknown" })),
        ConsistencyVerdict::BudgetExhausted => (false, json!({ "verdict": "budget-exhausted" })),
    };
    Ok(vec![Record::new("consistency", pass, detail)])
}

fn randeval(path: &Path, require_resolved: bool, limits: &Limits) -> Result<Vec<Record>> {
    let c = RandCircuit::from_circuit(parse_circuit(&read(path)?)?)?;
    let n = c.num_inputs();
    limits.check_vars(n)?;
    Assignment::all(n)
        .map(|a| {
            let v = eval_R(&c, &a, limits)?;
            let blocks: Vec<u64> = block_values(&c, &a, limits)?
                .into_iter()
                .map(|(count, _)| count)
                .collect();
            Ok(Record::new(
                format!("A={a}"),
                !(require_resolved && v == TriBool::Undefined),
                json!({ "value": v, "counts": blocks, "samples": 1u64 << c.num_rand() }),
            ))
        })
        .collect()
}

fn dwphp_range(a: u32, family: &str, m: u32, seed: u64, limits: &Limits) -> Result<Vec<Record>> {
    let kind: FamilyKind = family.parse()?;
    if !(2..=5).contains(&a) {
        bail!("--a must lie in 2..=5");
    }
    let inst = gen::dwphp_family(&mut gen::rng(seed), a, kind);
    let r = dwphp_range_experiment(&inst, m, limits)?;
    Ok(vec![Record::new("dwphp-range", r.pass, serde_json::to_value(&r)?)])
}

fn dwphp_embed(
    m: usize,
    n: usize,
    c: Option<&Path>,
    d: Option<&Path>,
    seed: u64,
    limits: &Limits,
) -> Result<Vec<Record>> {
    let mut rng = gen::rng(seed);
    let k = m as u32;
    let d = match d {
        Some(p) => outputs(&parse_dag(&read(p)?)?)?,
        None => (0..n).map(|_| gen::random_circuit(&mut rng, k, 0, 3)).collect(),
    };
    let c = match c {
        Some(p) => outputs(&parse_dag(&read(p)?)?)?,
        // C_i copies parameter p_i, or ignores it on a coin flip
        None => (0..m)
            .map(|i| {
                if rng.gen_bool(0.75) {
                    Circuit::var((n + i) as u32, (n + m) as u32)
                } else {
                    gen::random_circuit(&mut rng, (n + m) as u32, 0, 3)
                }
            })
            .collect(),
    };
    let bits = |y: &[bool]| y.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
    Ok(match dwphp_surjection_set(m, n, &c, &d, limits)? {
        SurjectionOutcome::Set(members) => members
            .iter()
            .map(|s| {
                Record::new(
                    format!("Y={}", bits(&s.y)),
                    s.element.is_one(),
                    json!({ "witness": s.witness.to_string(), "size": s.element.witness().size() }),
                )
            })
            .collect(),
        SurjectionOutcome::Missing(ys) => {
            vec![Record::new(
                "surjection",
                false,
                json!({ "missing": ys.iter().map(|y| bits(y)).collect::<Vec<_>>() }),
            )]
        }
    })
}
