use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub verdicts: Vec<Verdict>,
    pub data: Map<String, Value>,
    /// Milliseconds per phase. Kept apart so the rest is reproducible.
    pub timings: BTreeMap<String, f64>,
    #[serde(skip)]
    clock: Option<(String, Instant)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs: Map::new(),
            verdicts: Vec::new(),
            data: Map::new(),
            timings: BTreeMap::new(),
            clock: None,
        }
    }

    pub fn input(&mut self, key: &str, v: impl Serialize) {
        self.inputs.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn data(&mut self, key: &str, v: impl Serialize) {
        self.data.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    /// A failing verdict must say why.
    pub fn verdict(&mut self, check: &str, result: Result<(), String>) {
        let (pass, witness) = match result {
            Ok(()) => (true, None),
            Err(w) => (false, Some(w)),
        };
        self.verdicts.push(Verdict { check: check.into(), pass, witness });
    }

    pub fn check(&mut self, check: &str, pass: bool, witness: impl FnOnce() -> String) {
        self.verdict(check, if pass { Ok(()) } else { Err(witness()) });
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Starts timing `phase`, closing the previous one.
    pub fn phase(&mut self, phase: &str) {
        self.stop();
        self.clock = Some((phase.to_string(), Instant::now()));
    }

    pub fn stop(&mut self) {
        if let Some((name, start)) = self.clock.take() {
            *self.timings.entry(name).or_default() += start.elapsed().as_secs_f64() * 1e3;
        }
    }

    pub fn render(&mut self, json: bool) -> String {
        self.stop();
        if json {
            let mut s = serde_json::to_string_pretty(self).expect("serializable");
            s.push('\n');
            return s;
        }
        let mut out = format!("{}\n", self.command);
        for (k, v) in &self.inputs {
            out.push_str(&format!("  input {k}: {}\n", compact(v)));
        }
        for v in &self.verdicts {
            match &v.witness {
                None => out.push_str(&format!("PASS {}\n", v.check)),
                Some(w) => out.push_str(&format!("FAIL {}: {w}\n", v.check)),
            }
        }
        for (k, v) in &self.data {
            out.push_str(&format!("{k}: {}\n", compact(v)));
        }
        let total: f64 = self.timings.values().sum();
        out.push_str(&format!("time: {total:.1} ms\n"));
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
