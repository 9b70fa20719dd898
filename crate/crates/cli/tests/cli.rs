use std::path::Path;
use std::process::{Command, Output};

use bvlab_core::instances::{mutate_proof, random_ef_proof, rng};
use bvlab_core::proof::write_proof;
use serde_json::Value;

fn bvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvlab")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = bvlab(&all);
    let v =
        serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn strip_times(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_time_ms");
            m.values_mut().for_each(strip_times);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_times),
        _ => {}
    }
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn parse_dumps_the_tree() {
    let out = bvlab(&["parse", "X(0)&X(1)"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("And(") && text.contains("Member("), "{text}");
}

#[test]
fn dwphp_range_example() {
    let (code, v) = json(&["dwphp-range", "--a", "2", "--family", "random", "--seed", "7"]);
    assert_eq!(code, 0);
    let d = &v["records"][0]["detail"];
    assert!(d["p_prime"].as_u64().unwrap() >= 48);
    assert_eq!(v["seed"], 7);
}

#[test]
fn mutated_proof_is_rejected_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(5);
    let p = random_ef_proof(&mut r, 2, 1, 4);
    let (proof, circuits) = write_proof(&p);
    let good = write(dir.path(), "good.proof", &proof);
    write(dir.path(), "good.circ", &circuits);
    let (code, v) = json(&["ef-check", &good]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(bvlab(&["wf-check", &good]).status.code(), Some(0));

    let (bad, _) = mutate_proof(&mut r, &p);
    let (proof, circuits) = write_proof(&bad);
    let bad = write(dir.path(), "bad.proof", &proof);
    write(dir.path(), "bad.circ", &circuits);
    let (code, v) = json(&["ef-check", &bad]);
    assert_eq!(code, 1);
    let d = &v["records"][0]["detail"];
    assert_eq!(d["accepted"], false);
    assert!(d["line"].as_u64().unwrap() >= 1);
}

#[test]
fn consistency_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let clash = write(
        dir.path(),
        "s.circ",
        "nvars 1 nrand 0\n0 VAR 0\n1 NOT 0\nOUTPUT 0\nOUTPUT 1\n",
    );
    let (code, v) = json(&["consistency", &clash, "--l", "200"]);
    assert_eq!(
        (code, v["records"][0]["detail"]["verdict"].as_str()),
        (1, Some("inconsistent"))
    );
    let fine = write(
        dir.path(),
        "t.circ",
        "nvars 2 nrand 0\n0 VAR 0\n1 VAR 1\nOUTPUT 0\nOUTPUT 1\n",
    );
    let (code, v) = json(&["consistency", &fine]);
    assert_eq!(
        (code, v["records"][0]["detail"]["verdict"].as_str()),
        (0, Some("consistent"))
    );
}

#[test]
fn randeval_reads_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    // x0 and (z0 or z1): probability 3/4 when x0 holds
    let c = write(
        dir.path(),
        "r.circ",
        "nvars 1 nrand 2\n0 RVAR 0\n1 RVAR 1\n2 OR 0 1\n3 VAR 0\n4 AND 2 3\nOUTPUT 4\n",
    );
    let (code, v) = json(&["randeval", &c, "--require-resolved"]);
    assert_eq!(code, 0);
    let values: Vec<&str> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["detail"]["value"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["Zero", "One"]);
    // z0 alone sits at 1/2
    let half = write(dir.path(), "h.circ", "nvars 1 nrand 1\n0 RVAR 0\nOUTPUT 0\n");
    assert_eq!(bvlab(&["randeval", &half, "--require-resolved"]).status.code(), Some(1));
    assert_eq!(bvlab(&["randeval", &half]).status.code(), Some(0));
}

#[test]
fn formula_commands_pass() {
    for args in [
        &["translate", "E i < |X| . X(i) & !Y(i)", "--bounds", "X=3,Y=3"][..],
        &["bval", "A i < |X| . X(i)", "--bounds", "X=3"],
        &["force-check", "X(0) -> Y(1)", "--bounds", "X=2,Y=2", "--n", "3"],
        &["witness", "Z(0) & X(0)", "--bounds", "X=2", "--t", "3"],
        &["mcv", "--a", "5", "--n", "2", "--count", "4"],
        &["dwphp-embed", "--m", "3", "--n", "2"],
    ] {
        let (code, v) = json(args);
        assert_eq!(code, 0, "{args:?}: {v}");
        assert_eq!(v["failed"], 0);
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bvlab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(bvlab(&["--max-n", "21", "mcv"]).status.code(), Some(2));
    assert_eq!(bvlab(&["parse", "X(0"]).status.code(), Some(2));
    assert_eq!(
        bvlab(&["dwphp-range", "--a", "2", "--family", "bogus"]).status.code(),
        Some(2)
    );
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["mcv", "--count", "5"][..], &["dwphp-range", "--a", "3"], &["suite"]] {
        let runs: Vec<Value> = (0..2)
            .map(|k| {
                let out = dir.path().join(format!("r{k}.json"));
                let mut all = args.to_vec();
                all.extend(["--seed", "11", "--format", "json", "--out", "OUT"]);
                let all: Vec<&str> = all
                    .iter()
                    .map(|a| if *a == "OUT" { out.to_str().unwrap() } else { a })
                    .collect();
                bvlab(&all);
                let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
                strip_times(&mut v);
                v["command"] = Value::Null;
                v
            })
            .collect();
        assert_eq!(runs[0].to_string(), runs[1].to_string(), "{args:?}");
    }
}
