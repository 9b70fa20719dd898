//! Proof files. Circuits live in a companion circuit file and are referenced
//! by id.
//!
//! ```text
//! 1 PREMISE 4
//! 2 AXIOM K 9
//! 3 MP 1 2 11
//! 4 EXT 5 14
//! 5 DWPHP m=2 n=1 r=6,7 C=2,3 D=1 [x=0] [<ref>]
//! ```
//!
//! A DWPHP line without a trailing reference stands for the disjunction its
//! parameters describe.

use std::fmt::Write;

use super::{DwphpParams, Justification, Proof, ProofLine};
use crate::circuit::{write_dag, Circuit, CircuitBuilder, CircuitDag};
use crate::error::{Error, Result};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col: 1,
        msg: msg.into(),
    }
}

fn list<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| err(line, format!("bad entry {s:?} in {key}="))))
        .collect()
}

pub fn parse_proof(text: &str, dag: &CircuitDag) -> Result<Proof> {
    let n = dag.num_inputs;
    let circuit = |line: usize, id: u64| -> Result<Circuit> { dag.circuit(id).map_err(|e| err(line, e.to_string())) };
    let mut proof = Proof::default();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let num = |i: usize| -> Result<u64> {
            let t = toks.get(i).ok_or_else(|| err(line, "missing operand"))?;
            t.parse()
                .map_err(|_| err(line, format!("expected a number, found {t:?}")))
        };
        let idx = num(0)? as usize;
        if idx != proof.len() + 1 {
            return Err(err(
                line,
                format!("expected line number {}, found {idx}", proof.len() + 1),
            ));
        }
        let kind = *toks.get(1).ok_or_else(|| err(line, "missing justification"))?;
        let arity = |want: usize| -> Result<()> {
            if toks.len() != want {
                Err(err(line, format!("{kind} takes {} operand(s)", want - 2)))
            } else {
                Ok(())
            }
        };
        let (c, just) = match kind {
            "AXIOM" => {
                arity(4)?;
                let s = toks[2].parse().map_err(|e: Error| err(line, e.to_string()))?;
                (circuit(line, num(3)?)?, Justification::Axiom(s))
            }
            "MP" => {
                arity(5)?;
                let just = Justification::Mp {
                    premise: num(2)? as usize,
                    implication: num(3)? as usize,
                };
                (circuit(line, num(4)?)?, just)
            }
            "EXT" => {
                arity(4)?;
                (circuit(line, num(3)?)?, Justification::Ext { var: num(2)? as u32 })
            }
            "PREMISE" => {
                arity(3)?;
                (circuit(line, num(2)?)?, Justification::Premise)
            }
            "DWPHP" => {
                let (mut m, mut nn, mut r, mut cs, mut ds, mut holes, mut out) =
                    (None, None, None, None, None, None, None);
                for t in &toks[2..] {
                    match t.split_once('=') {
                        Some(("m", v)) => m = Some(list::<usize>(line, "m", v)?.first().copied().unwrap_or(0)),
                        Some(("n", v)) => nn = Some(list::<usize>(line, "n", v)?.first().copied().unwrap_or(0)),
                        Some(("r", v)) => r = Some(list::<u32>(line, "r", v)?),
                        Some(("C", v)) => cs = Some(list::<u64>(line, "C", v)?),
                        Some(("D", v)) => ds = Some(list::<u64>(line, "D", v)?),
                        Some(("x", v)) => holes = Some(list::<u32>(line, "x", v)?),
                        Some((key, _)) => return Err(err(line, format!("unknown DWPHP parameter {key}"))),
                        None if out.is_none() => {
                            out = Some(
                                t.parse::<u64>()
                                    .map_err(|_| err(line, format!("bad reference {t:?}")))?,
                            )
                        }
                        None => return Err(err(line, format!("unexpected token {t:?}"))),
                    }
                }
                let missing = |k: &str| err(line, format!("DWPHP needs {k}="));
                let nn = nn.ok_or_else(|| missing("n"))?;
                let params = DwphpParams {
                    m: m.ok_or_else(|| missing("m"))?,
                    n: nn,
                    r: r.ok_or_else(|| missing("r"))?,
                    c: cs
                        .ok_or_else(|| missing("C"))?
                        .into_iter()
                        .map(|id| circuit(line, id))
                        .collect::<Result<_>>()?,
                    d: ds
                        .ok_or_else(|| missing("D"))?
                        .into_iter()
                        .map(|id| circuit(line, id))
                        .collect::<Result<_>>()?,
                    holes: holes.unwrap_or_else(|| (0..nn as u32).collect()),
                };
                let c = match out {
                    Some(id) => circuit(line, id)?,
                    None => {
                        if params.r.len() != params.m
                            || params.c.len() != params.m
                            || params.holes.len() != params.n
                            || (params.d.len() != params.n && params.d.len() != params.m * params.n)
                        {
                            return Err(err(line, "DWPHP parameter counts do not match m and n"));
                        }
                        let mut b = CircuitBuilder::new(n, 0);
                        let node = params.build(&mut b);
                        b.finish(node)
                    }
                };
                (c, Justification::Dwphp(params))
            }
            other => return Err(err(line, format!("unknown justification {other:?}"))),
        };
        proof.lines.push(ProofLine {
            circuit: c.widened(n.max(c.num_inputs()), 0),
            just,
        });
    }
    Ok(proof)
}

/// The proof file and its companion circuit file.
pub fn write_proof(p: &Proof) -> (String, String) {
    let mut circuits: Vec<Circuit> = p.lines.iter().map(|l| l.circuit.clone()).collect();
    for l in &p.lines {
        if let Justification::Dwphp(d) = &l.just {
            circuits.extend(d.c.iter().cloned());
            circuits.extend(d.d.iter().cloned());
        }
    }
    let (dag, ids) = write_dag(&circuits);
    let mut extra = ids[p.lines.len()..].iter();
    let mut out = String::new();
    let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    for (k, l) in p.lines.iter().enumerate() {
        let id = ids[k];
        let i = k + 1;
        match &l.just {
            Justification::Axiom(s) => writeln!(out, "{i} AXIOM {s} {id}"),
            Justification::Mp { premise, implication } => writeln!(out, "{i} MP {premise} {implication} {id}"),
            Justification::Ext { var } => writeln!(out, "{i} EXT {var} {id}"),
            Justification::Premise => writeln!(out, "{i} PREMISE {id}"),
            Justification::Dwphp(d) => {
                let cs: Vec<String> = d.c.iter().map(|_| extra.next().unwrap().to_string()).collect();
                let ds: Vec<String> = d.d.iter().map(|_| extra.next().unwrap().to_string()).collect();
                writeln!(
                    out,
                    "{i} DWPHP m={} n={} r={} C={} D={} x={} {id}",
                    d.m,
                    d.n,
                    join(&d.r),
                    cs.join(","),
                    ds.join(","),
                    join(&d.holes)
                )
            }
        }
        .unwrap();
    }
    (out, dag)
}

#[cfg(test)]
mod tests {
    use super::super::{check_ef, check_wf, ProofBuilder, Scheme};
    use super::*;
    use crate::circuit::parse_dag;

    #[test]
    fn round_trip() {
        let mut pb = ProofBuilder::new(2);
        let (p, q) = (pb.b.var(0), pb.b.var(1));
        let l1 = pb.axiom(Scheme::True, &[]);
        let t = pb.node(l1);
        let l2 = pb.axiom(Scheme::K, &[t, p]);
        pb.mp(l1, l2);
        pb.axiom(Scheme::OrI2, &[p, q]);
        let proof = pb.finish();
        let (text, dag) = write_proof(&proof);
        let back = parse_proof(&text, &parse_dag(&dag).unwrap()).unwrap();
        assert_eq!(back.len(), 4);
        assert!(check_ef(&back).is_ok());
        assert_eq!(back.total_size(), proof.total_size());
    }

    #[test]
    fn dwphp_lines_without_reference() {
        let dag = parse_dag("nvars 4 nrand 0\n0 VAR 0\n1 VAR 1\n2 NOT 0\nOUTPUT 0\n").unwrap();
        let p = parse_proof("1 DWPHP m=2 n=1 r=2,3 C=0,2 D=1\n", &dag).unwrap();
        assert!(check_wf(&p).is_ok());
        let (text, circ) = write_proof(&p);
        let again = parse_proof(&text, &parse_dag(&circ).unwrap()).unwrap();
        assert!(check_wf(&again).is_ok());
        assert!(parse_proof("1 DWPHP m=2 n=1 r=2 C=0,2 D=1\n", &dag).is_err());
    }

    #[test]
    fn diagnostics() {
        let dag = parse_dag("nvars 1 nrand 0\n0 CONST 1\nOUTPUT 0\n").unwrap();
        assert!(parse_proof("1 AXIOM TRUE 0\n", &dag).is_ok());
        assert!(matches!(
            parse_proof("2 AXIOM TRUE 0\n", &dag),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_proof("1 AXIOM BOGUS 0\n", &dag).is_err());
        assert!(parse_proof("1 AXIOM TRUE 7\n", &dag).is_err());
        assert!(parse_proof("1 MP 1 0\n", &dag).is_err());
    }
}
