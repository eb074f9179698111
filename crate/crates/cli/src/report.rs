//! JSON report envelope: `{command, model_hash, inputs, outcome, witness?, stats, warnings}`.

use std::path::Path;

use cbn::logic::Witness;
use cbn::rational::{render, to_fixed, Rational};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::Exit;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_file(path: &Path) -> Result<String, String> {
    std::fs::read(path).map(|b| sha256_hex(&b)).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Exact value plus a 12-digit decimal approximation.
pub fn number(r: &Rational) -> Value {
    json!({"exact": render(r), "approx": to_fixed(r, 12)})
}

pub fn witness(w: &Witness) -> Value {
    serde_json::to_value(w).expect("witness serializes")
}

pub struct Report {
    command: &'static str,
    model_hash: Value,
    inputs: Map<String, Value>,
    outcome: Value,
    witness: Option<Value>,
    stats: Map<String, Value>,
    warnings: Vec<String>,
    pub exit: Exit,
}

impl Report {
    pub fn new(command: &'static str, model_hash: Option<String>) -> Self {
        Report {
            command,
            model_hash: model_hash.map(Value::String).unwrap_or(Value::Null),
            inputs: Map::new(),
            outcome: Value::Null,
            witness: None,
            stats: Map::new(),
            warnings: Vec::new(),
            exit: Exit::Ok,
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.into(), v.into());
        self
    }

    pub fn outcome(&mut self, v: Value) -> &mut Self {
        self.outcome = v;
        self
    }

    pub fn witness(&mut self, w: Option<&Witness>) -> &mut Self {
        self.witness = w.map(witness);
        self
    }

    pub fn stat(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.stats.insert(key.into(), v.into());
        self
    }

    pub fn warn(&mut self, w: impl Into<String>) -> &mut Self {
        self.warnings.push(w.into());
        self
    }

    pub fn exit(&mut self, e: Exit) -> &mut Self {
        self.exit = e;
        self
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), self.command.into());
        m.insert("model_hash".into(), self.model_hash.clone());
        m.insert("inputs".into(), Value::Object(self.inputs.clone()));
        m.insert("outcome".into(), self.outcome.clone());
        if let Some(w) = &self.witness {
            m.insert("witness".into(), w.clone());
        }
        m.insert("stats".into(), Value::Object(self.stats.clone()));
        m.insert("warnings".into(), self.warnings.clone().into());
        Value::Object(m)
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}
