//! JSON model documents.
//!
//! ```json
//! {
//!   "nodes": [
//!     {"name": "Rain", "states": ["T", "F"], "parents": [], "table": {"|T": "x", "|F": "1-x"}}
//!   ],
//!   "variables": {"x": ["x"], "mp": ["mp_R"]},
//!   "constraints": ["0.1 <= x", "x <= 0.3"],
//!   "marginals": {"mp_R": {"node": "Rain", "state": "T", "evidence": {}}}
//! }
//! ```
//!
//! Table keys are `"<parent states, comma separated>|<own state>"`, parent states in
//! the order of `parents`. `constraints` holds the user constraints only: the
//! defining constraints of every entry of `marginals` are regenerated on load.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{ConstrainedBN, MarginalSpec, ModelError, NodeSpec};
use crate::inference::InferenceOptions;
use crate::terms::{parse_constraint, parse_term, Name, Term};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub nodes: Vec<NodeFile>,
    #[serde(default)]
    pub variables: VariablesFile,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub marginals: BTreeMap<Name, MarginalSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeFile {
    pub name: String,
    pub states: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    pub table: Map<String, Value>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariablesFile {
    #[serde(default)]
    pub x: Vec<String>,
    #[serde(default)]
    pub mp: Vec<String>,
}

pub fn load_model(path: &Path) -> Result<ConstrainedBN, ModelError> {
    load_model_with(path, InferenceOptions::default())
}

pub fn load_model_with(path: &Path, options: InferenceOptions) -> Result<ConstrainedBN, ModelError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModelError::Schema(format!("cannot read {}: {e}", path.display())))?;
    model_from_str(&text, options)
}

pub fn model_from_str(text: &str, options: InferenceOptions) -> Result<ConstrainedBN, ModelError> {
    let file: ModelFile = serde_json::from_str(text)?;
    file.into_model(options)
}

fn label_set(items: &[String], what: &str) -> Result<BTreeSet<Name>, ModelError> {
    let mut out = BTreeSet::new();
    for s in items {
        if !out.insert(Name::from(s.as_str())) {
            return Err(ModelError::Schema(format!("{what} '{s}' listed twice")));
        }
    }
    Ok(out)
}

impl ModelFile {
    pub fn into_model(self, options: InferenceOptions) -> Result<ConstrainedBN, ModelError> {
        let states_of: BTreeMap<&str, &[String]> =
            self.nodes.iter().map(|n| (n.name.as_str(), n.states.as_slice())).collect();
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            nodes.push(parse_node(n, &states_of)?);
        }
        let x_vars = label_set(&self.variables.x, "x variable")?;
        let mp_vars = label_set(&self.variables.mp, "mp variable")?;
        let constraints = self
            .constraints
            .iter()
            .map(|src| {
                parse_constraint(src)
                    .map_err(|source| ModelError::Parse { context: format!("constraint '{src}'"), source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        ConstrainedBN::new(nodes, x_vars, mp_vars, constraints, self.marginals, options)
    }

    pub fn from_model(b: &ConstrainedBN) -> ModelFile {
        let nodes = b
            .nodes()
            .iter()
            .map(|n| {
                let mut table = Map::new();
                let parent_states: Vec<&[Name]> =
                    n.parents.iter().map(|p| b.node(p).expect("parent exists").states.as_slice()).collect();
                for (row, entries) in n.rows().enumerate() {
                    let labels = row_labels(row, &parent_states);
                    for (state, t) in n.states.iter().zip(entries) {
                        table.insert(format!("{}|{}", labels.join(","), state), Value::String(t.to_string()));
                    }
                }
                NodeFile {
                    name: n.name.to_string(),
                    states: n.states.iter().map(|s| s.to_string()).collect(),
                    parents: n.parents.iter().map(|s| s.to_string()).collect(),
                    table,
                }
            })
            .collect();
        ModelFile {
            nodes,
            variables: VariablesFile {
                x: b.x_vars().iter().map(|s| s.to_string()).collect(),
                mp: b.mp_vars().iter().map(|s| s.to_string()).collect(),
            },
            constraints: b.user_constraints().iter().map(|c| c.to_string()).collect(),
            marginals: b.marginals().clone(),
        }
    }
}

/// Parent labels of a row index: first parent most significant.
fn row_labels<'a>(mut row: usize, parent_states: &[&'a [Name]]) -> Vec<&'a str> {
    let mut labels = vec![""; parent_states.len()];
    for (k, states) in parent_states.iter().enumerate().rev() {
        labels[k] = &states[row % states.len()];
        row /= states.len();
    }
    labels
}

fn parse_node(n: &NodeFile, states_of: &BTreeMap<&str, &[String]>) -> Result<NodeSpec, ModelError> {
    let node: Name = n.name.as_str().into();
    let mut parent_states = Vec::with_capacity(n.parents.len());
    for p in &n.parents {
        match states_of.get(p.as_str()) {
            Some(s) => parent_states.push(*s),
            None => return Err(ModelError::UnknownParent { node, parent: p.as_str().into() }),
        }
    }
    let rows: usize = parent_states.iter().map(|s| s.len()).product();
    let width = n.states.len();
    let expected = rows * width;
    if n.table.len() != expected {
        return Err(ModelError::TableArity { node, expected, found: n.table.len() });
    }
    let mut table: Vec<Option<Term>> = vec![None; expected];
    let key_err = |detail: String| ModelError::TableKey { node: node.clone(), detail };
    for (key, value) in &n.table {
        let (parents_part, own) = key.rsplit_once('|').ok_or_else(|| key_err(format!("key '{key}' lacks '|'")))?;
        let labels: Vec<&str> = if parents_part.trim().is_empty() {
            Vec::new()
        } else {
            parents_part.split(',').map(str::trim).collect()
        };
        if labels.len() != parent_states.len() {
            return Err(key_err(format!("key '{key}' names {} parent states, expected {}", labels.len(), parent_states.len())));
        }
        let mut row = 0;
        for (label, states) in labels.iter().zip(&parent_states) {
            let i = states
                .iter()
                .position(|s| s == label)
                .ok_or_else(|| key_err(format!("key '{key}': unknown parent state '{label}'")))?;
            row = row * states.len() + i;
        }
        let own = own.trim();
        let col = n
            .states
            .iter()
            .position(|s| s == own)
            .ok_or_else(|| key_err(format!("key '{key}': unknown state '{own}'")))?;
        let src = match value {
            Value::String(s) => s.clone(),
            Value::Number(x) => x.to_string(),
            other => return Err(key_err(format!("key '{key}': expected an expression string, found {other}"))),
        };
        let term = parse_term(&src)
            .map_err(|source| ModelError::Parse { context: format!("table entry '{key}' of node '{}'", n.name), source })?;
        let slot = &mut table[row * width + col];
        if slot.is_some() {
            return Err(key_err(format!("key '{key}' given twice")));
        }
        *slot = Some(term);
    }
    let table = table.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| key_err("table is not total".into()))?;
    Ok(NodeSpec::new(
        node,
        n.states.iter().map(|s| Name::from(s.as_str())).collect(),
        n.parents.iter().map(|s| Name::from(s.as_str())).collect(),
        table,
    ))
}

/// Pretty-printed model document (user constraints and marginal specs only).
pub fn print_model(b: &ConstrainedBN) -> String {
    let mut text = serde_json::to_string_pretty(&ModelFile::from_model(b)).expect("model serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    const COIN: &str = r#"{
        "nodes": [
            {"name": "A", "states": ["t", "f"], "parents": [], "table": {"|t": "x", "|f": "1-x"}},
            {"name": "B", "states": ["t", "f"], "parents": ["A"],
             "table": {"t|t": "0.9", "t|f": "0.1", "f|t": 0.2, "f|f": "0.8"}}
        ],
        "variables": {"x": ["x"], "mp": ["mp_B"]},
        "constraints": ["0.1 <= x", "x <= 0.3"],
        "marginals": {"mp_B": {"node": "B", "state": "t"}}
    }"#;

    #[test]
    fn load_and_round_trip() {
        let b = model_from_str(COIN, InferenceOptions::default()).unwrap();
        assert_eq!(b.nodes().len(), 2);
        assert_eq!(b.node("B").unwrap().table()[2].to_string(), "0.2");
        let again = model_from_str(&print_model(&b), InferenceOptions::default()).unwrap();
        assert_eq!(b, again);
        assert_eq!(print_model(&b), print_model(&again));
    }

    #[test]
    fn undeclared_constraint_variable() {
        let src = COIN.replace("x <= 0.3", "y <= 0.3");
        let err = model_from_str(&src, InferenceOptions::default()).unwrap_err();
        assert!(err.to_string().contains("variable not in X"), "{err}");
    }

    #[test]
    fn bad_keys_are_reported() {
        let src = COIN.replace("\"f|f\"", "\"f|g\"");
        assert!(matches!(model_from_str(&src, InferenceOptions::default()), Err(ModelError::TableKey { .. })));
        let src = COIN.replace("\"nodes\"", "\"nodez\"");
        assert!(matches!(model_from_str(&src, InferenceOptions::default()), Err(ModelError::Json(_))));
    }

    #[test]
    fn degenerate_single_node() {
        let src = r#"{"nodes": [{"name": "n", "states": ["s"], "table": {"|s": "1"}}]}"#;
        let b = model_from_str(src, InferenceOptions::default()).unwrap();
        assert_eq!(b.nodes()[0].table().len(), 1);
    }
}
