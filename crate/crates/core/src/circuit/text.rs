//! Line-oriented circuit files.
//!
//! ```text
//! # comment
//! nvars 2 nrand 0
//! 0 VAR 0
//! 1 VAR 1
//! 2 AND 0 1
//! OUTPUT 2
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Circuit, CircuitBuilder, Gate, NodeId};
use crate::error::{Error, Result};

/// A parsed circuit file: a shared DAG whose file-level ids can each be read as
/// the root of a circuit.
#[derive(Clone, Debug)]
pub struct CircuitDag {
    pub num_inputs: u32,
    pub num_rand: u32,
    builder: CircuitBuilder,
    ids: BTreeMap<u64, NodeId>,
    pub outputs: Vec<u64>,
}

impl CircuitDag {
    /// The circuit rooted at file id `id`.
    pub fn circuit(&self, id: u64) -> Result<Circuit> {
        let node = self
            .ids
            .get(&id)
            .ok_or_else(|| Error::Invalid(format!("unknown circuit reference {id}")))?;
        Ok(self.builder.finish(*node).widened(self.num_inputs, self.num_rand))
    }

    pub fn ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.ids.keys().copied()
    }
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

/// Parses a circuit file that may carry any number of `OUTPUT` lines.
pub fn parse_dag(text: &str) -> Result<CircuitDag> {
    let mut header: Option<(u32, u32)> = None;
    let mut builder = CircuitBuilder::new(0, 0);
    let mut ids: BTreeMap<u64, NodeId> = BTreeMap::new();
    let mut outputs = Vec::new();
    let mut last_id: Option<u64> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<(usize, &str)> = content
            .split_whitespace()
            .map(|t| (t.as_ptr() as usize - raw.as_ptr() as usize + 1, t))
            .collect();
        if toks.is_empty() {
            continue;
        }
        let num = |i: usize| -> Result<u64> {
            let (col, t) = toks.get(i).ok_or_else(|| err(line, raw.len() + 1, "missing operand"))?;
            t.parse::<u64>()
                .map_err(|_| err(line, *col, format!("expected a number, found {t:?}")))
        };
        let Some((nvars, nrand)) = header else {
            if toks.len() != 4 || toks[0].1 != "nvars" || toks[2].1 != "nrand" {
                return Err(err(line, toks[0].0, "expected header `nvars <n> nrand <m>`"));
            }
            header = Some((num(1)? as u32, num(3)? as u32));
            builder = CircuitBuilder::new(header.unwrap().0, header.unwrap().1);
            continue;
        };
        if toks[0].1 == "OUTPUT" {
            let id = num(1)?;
            if !ids.contains_key(&id) {
                return Err(err(line, toks[1].0, format!("OUTPUT references undefined id {id}")));
            }
            outputs.push(id);
            continue;
        }
        let id = num(0)?;
        if last_id.is_some_and(|l| id <= l) {
            return Err(err(line, toks[0].0, format!("id {id} is not strictly increasing")));
        }
        last_id = Some(id);
        let kind = toks
            .get(1)
            .ok_or_else(|| err(line, raw.len() + 1, "missing gate kind"))?;
        let child = |i: usize| -> Result<NodeId> {
            let c = num(i)?;
            ids.get(&c)
                .copied()
                .ok_or_else(|| err(line, toks[i].0, format!("reference to undefined id {c}")))
        };
        let arity = match kind.1 {
            "VAR" | "RVAR" | "CONST" | "NOT" => 3,
            "AND" | "OR" => 4,
            other => return Err(err(line, kind.0, format!("unknown gate kind {other:?}"))),
        };
        if toks.len() != arity {
            return Err(err(line, kind.0, format!("{} takes {} operand(s)", kind.1, arity - 2)));
        }
        let gate = match kind.1 {
            "VAR" => {
                let k = num(2)? as u32;
                if k >= nvars {
                    return Err(err(line, toks[2].0, format!("VAR {k} out of range (nvars {nvars})")));
                }
                Gate::Var(k)
            }
            "RVAR" => {
                let k = num(2)? as u32;
                if k >= nrand {
                    return Err(err(line, toks[2].0, format!("RVAR {k} out of range (nrand {nrand})")));
                }
                Gate::RVar(k)
            }
            "CONST" => match num(2)? {
                0 => Gate::Const(false),
                1 => Gate::Const(true),
                _ => return Err(err(line, toks[2].0, "CONST takes 0 or 1")),
            },
            "NOT" => Gate::Not(child(2)?),
            "AND" => Gate::And(child(2)?, child(3)?),
            _ => Gate::Or(child(2)?, child(3)?),
        };
        ids.insert(id, builder.intern(gate));
    }
    let (num_inputs, num_rand) = header.ok_or_else(|| err(1, 1, "empty circuit file"))?;
    Ok(CircuitDag {
        num_inputs,
        num_rand,
        builder,
        ids,
        outputs,
    })
}

/// Parses a circuit file with exactly one `OUTPUT` line.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let dag = parse_dag(text)?;
    match dag.outputs.as_slice() {
        [id] => dag.circuit(*id),
        [] => Err(err(text.lines().count().max(1), 1, "missing OUTPUT line")),
        _ => Err(err(text.lines().count(), 1, "more than one OUTPUT line")),
    }
}

pub(super) fn write_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "nvars {} nrand {}", c.num_inputs(), c.num_rand()).unwrap();
    let mut b = CircuitBuilder::new(c.num_inputs(), c.num_rand());
    let root = b.import(c);
    let compact = b.finish(root);
    for (i, g) in compact.gates().iter().enumerate() {
        write_gate(&mut out, i, g);
    }
    writeln!(out, "OUTPUT {}", compact.output()).unwrap();
    out
}

/// Writes several circuits over one shared DAG with an `OUTPUT` line each,
/// returning the file id of every circuit.
pub fn write_dag(circuits: &[Circuit]) -> (String, Vec<u64>) {
    let n = circuits.iter().map(Circuit::num_inputs).max().unwrap_or(0);
    let m = circuits.iter().map(Circuit::num_rand).max().unwrap_or(0);
    let mut b = CircuitBuilder::new(n, m);
    let roots: Vec<NodeId> = circuits.iter().map(|c| b.import(c)).collect();
    let mut out = String::new();
    writeln!(out, "nvars {n} nrand {m}").unwrap();
    if roots.is_empty() {
        return (out, Vec::new());
    }
    let compact = b.finish_many(&roots);
    for (i, g) in compact[0].gates().iter().enumerate() {
        write_gate(&mut out, i, g);
    }
    let ids: Vec<u64> = compact.iter().map(|c| c.output().0 as u64).collect();
    for id in &ids {
        writeln!(out, "OUTPUT {id}").unwrap();
    }
    (out, ids)
}

fn write_gate(out: &mut String, i: usize, g: &Gate) {
    match g {
        Gate::Var(k) => writeln!(out, "{i} VAR {k}"),
        Gate::RVar(k) => writeln!(out, "{i} RVAR {k}"),
        Gate::Const(v) => writeln!(out, "{i} CONST {}", *v as u8),
        Gate::Not(x) => writeln!(out, "{i} NOT {x}"),
        Gate::And(x, y) => writeln!(out, "{i} AND {x} {y}"),
        Gate::Or(x, y) => writeln!(out, "{i} OR {x} {y}"),
    }
    .unwrap();
}

#[cfg(test)]
mod tests {
    use super::*;

    const XOR: &str = "\
# xor of two inputs
nvars 2 nrand 0
0 VAR 0
1 VAR 1
2 NOT 0
3 NOT 1
5 AND 0 3   # ids may skip
6 AND 2 1
7 OR 5 6
OUTPUT 7
";

    #[test]
    fn parses_and_prints() {
        let c = parse_circuit(XOR).unwrap();
        assert_eq!(c.truth_table(2).unwrap().to_string(), "0110");
        let again = parse_circuit(&c.to_text()).unwrap();
        assert!(again.same_structure(&c));
    }

    #[test]
    fn random_variables() {
        let c = parse_circuit("nvars 1 nrand 2\n0 RVAR 0\n1 RVAR 1\n2 OR 0 1\nOUTPUT 2\n").unwrap();
        assert_eq!(c.num_rand(), 2);
        assert_eq!(c.random_support().len(), 2);
    }

    #[test]
    fn diagnostics_carry_positions() {
        let e = parse_circuit("nvars 1 nrand 0\n0 VAR 0\n0 NOT 0\nOUTPUT 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, col: 1, .. }), "{e:?}");
        let e = parse_circuit("nvars 1 nrand 0\n0 VAR 0\n1 AND 0 4\nOUTPUT 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, col: 9, .. }), "{e:?}");
        let e = parse_circuit("nvars 1 nrand 0\n0 VAR 2\nOUTPUT 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        assert!(parse_circuit("nvars 1 nrand 0\n0 VAR 0\n").is_err());
        assert!(parse_circuit("0 VAR 0\n").is_err());
    }

    #[test]
    fn shared_dags_round_trip() {
        let a = parse_circuit(XOR).unwrap();
        let b = Circuit::var(1, 3);
        let (text, ids) = write_dag(&[a.clone(), b.clone()]);
        let dag = parse_dag(&text).unwrap();
        assert_eq!(dag.outputs, ids);
        assert!(dag.circuit(ids[0]).unwrap().same_structure(&a));
        assert!(dag.circuit(ids[1]).unwrap().same_structure(&b));
    }

    #[test]
    fn dag_references() {
        let dag = parse_dag(XOR).unwrap();
        assert_eq!(dag.circuit(5).unwrap().truth_table(2).unwrap().to_string(), "0100");
        assert!(dag.circuit(4).is_err());
    }
}
