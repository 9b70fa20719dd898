use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
    /// Free-form text shown in text mode only.
    #[serde(skip)]
    pub text: Option<String>,
}

impl Record {
    pub fn new(name: impl Into<String>, pass: bool, detail: Value) -> Self {
        Record {
            name: name.into(),
            pass,
            detail,
            text: None,
        }
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub seed: u64,
    pub records: Vec<Record>,
    pub passed: usize,
    pub failed: usize,
    pub wall_time_ms: u64,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64, records: Vec<Record>, wall_time_ms: u64) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        Report {
            command,
            seed,
            failed: records.len() - passed,
            passed,
            records,
            wall_time_ms,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let status = if r.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {} {}\n", r.name, r.detail));
            if let Some(t) = &r.text {
                out.push_str(t);
                if !t.ends_with('\n') {
                    out.push('\n');
                }
            }
        }
        out.push_str(&format!(
            "passed {} failed {} seed {} time {}ms\n",
            self.passed, self.failed, self.seed, self.wall_time_ms
        ));
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn emit(&self, json: bool, out: Option<&Path>) -> std::io::Result<()> {
        let body = if json { self.render_json() } else { self.render_text() };
        match out {
            Some(p) => std::fs::write(p, body),
            None => std::io::stdout().lock().write_all(body.as_bytes()),
        }
    }
}
