//! The constrained-BN data model: DAG, symbolic probability tables, constraint set
//! and typed variable sets.

mod concrete;
mod file;
mod sound;
mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inference::{self, InferenceError, InferenceOptions, MarginalDefinition};
use crate::terms::{Constraint, Name, ParseError, Term, VarKind};

pub use concrete::{concretize, complete_assignment, ConcreteBN, ConcreteNode, ConcretizeError};
pub use sound::{check_sound, unsoundness_condition, SoundVerdict};
pub use file::{load_model, load_model_with, model_from_str, print_model, ModelFile};
pub use validate::{defining_equations, validate_well_formed, DefiningEquation, Violation};

pub use crate::terms::Assignment;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("cannot parse {context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error("cycle detected through nodes {0:?}")]
    Cycle(Vec<Name>),
    #[error("duplicate node name '{0}'")]
    DuplicateNode(Name),
    #[error("node '{node}' has duplicate state '{state}'")]
    DuplicateState { node: Name, state: Name },
    #[error("node '{node}' has no states")]
    NoStates { node: Name },
    #[error("node '{node}' names unknown parent '{parent}'")]
    UnknownParent { node: Name, parent: Name },
    #[error("table of node '{node}' has {found} entries, expected {expected}")]
    TableArity { node: Name, expected: usize, found: usize },
    #[error("table of node '{node}': {detail}")]
    TableKey { node: Name, detail: String },
    #[error("variable not in X: '{var}' used in {context}")]
    UndeclaredVariable { var: Name, context: String },
    #[error("table of node '{node}' uses marginal variable '{var}'")]
    MarginalVarInTable { node: Name, var: Name },
    #[error("variable '{0}' is declared both as x and as mp")]
    KindClash(Name),
    #[error("marginal '{mp}': {detail}")]
    BadMarginal { mp: Name, detail: String },
    #[error("name '{0}' is already in use")]
    NameCollision(Name),
    #[error("symbolic inference failed for '{mp}': {source}")]
    Inference {
        mp: Name,
        #[source]
        source: InferenceError,
    },
}

/// Which marginal a marginal variable denotes: `p(node = state | evidence)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalSpec {
    pub node: Name,
    pub state: Name,
    #[serde(default)]
    pub evidence: BTreeMap<Name, Name>,
}

impl MarginalSpec {
    pub fn new(node: &str, state: &str) -> Self {
        MarginalSpec { node: node.into(), state: state.into(), evidence: BTreeMap::new() }
    }

    pub fn given(mut self, node: &str, state: &str) -> Self {
        self.evidence.insert(node.into(), state.into());
        self
    }
}

/// One node with its ordered outcomes, ordered parents and symbolic table.
///
/// The table is dense and row-major: rows enumerate parent configurations with
/// the first parent most significant, each row holds one term per own state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSpec {
    pub name: Name,
    pub states: Vec<Name>,
    pub parents: Vec<Name>,
    table: Vec<Term>,
}

impl NodeSpec {
    pub fn new(name: Name, states: Vec<Name>, parents: Vec<Name>, table: Vec<Term>) -> Self {
        NodeSpec { name, states, parents, table }
    }

    pub fn table(&self) -> &[Term] {
        &self.table
    }

    pub fn row_count(&self) -> usize {
        self.table.len() / self.states.len().max(1)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Term]> {
        self.table.chunks(self.states.len().max(1))
    }

    pub fn state_index(&self, state: &str) -> Option<usize> {
        self.states.iter().position(|s| s.as_ref() == state)
    }

    pub(crate) fn map_table(&self, f: impl Fn(&Term) -> Term) -> NodeSpec {
        NodeSpec { table: self.table.iter().map(f).collect(), ..self.clone() }
    }
}

/// A Bayesian network whose table entries are terms over `X_x`, together with a
/// constraint set over `X = X_x ∪ X_mp`.
///
/// The constraint set is the user-written constraints followed by the generated
/// defining constraints of every marginal listed in `marginals`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedBN {
    nodes: Vec<NodeSpec>,
    index: BTreeMap<Name, usize>,
    topo: Vec<usize>,
    x_vars: BTreeSet<Name>,
    mp_vars: BTreeSet<Name>,
    user_constraints: Vec<Constraint>,
    marginals: BTreeMap<Name, MarginalSpec>,
    definitions: BTreeMap<Name, MarginalDefinition>,
    options: InferenceOptions,
}

impl ConstrainedBN {
    /// Assembles and checks a model, generating the defining constraints of every
    /// marginal in `marginals`.
    pub fn new(
        nodes: Vec<NodeSpec>,
        x_vars: BTreeSet<Name>,
        mp_vars: BTreeSet<Name>,
        user_constraints: Vec<Constraint>,
        marginals: BTreeMap<Name, MarginalSpec>,
        options: InferenceOptions,
    ) -> Result<Self, ModelError> {
        let mut b = ConstrainedBN::from_parts_unchecked(nodes, x_vars, mp_vars, user_constraints, options)?;
        for (mp, spec) in marginals {
            if !b.mp_vars.contains(&mp) {
                return Err(ModelError::BadMarginal { mp, detail: "not declared as an mp variable".into() });
            }
            b.define_marginal(mp, spec)?;
        }
        b.check_declared()?;
        Ok(b)
    }

    /// Graph and variable checks without generating any marginal definitions.
    fn from_parts_unchecked(
        nodes: Vec<NodeSpec>,
        x_vars: BTreeSet<Name>,
        mp_vars: BTreeSet<Name>,
        user_constraints: Vec<Constraint>,
        options: InferenceOptions,
    ) -> Result<Self, ModelError> {
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateNode(n.name.clone()));
            }
            if n.states.is_empty() {
                return Err(ModelError::NoStates { node: n.name.clone() });
            }
            let mut seen = BTreeSet::new();
            for s in &n.states {
                if !seen.insert(s) {
                    return Err(ModelError::DuplicateState { node: n.name.clone(), state: s.clone() });
                }
            }
        }
        for n in &nodes {
            for p in &n.parents {
                if !index.contains_key(p) {
                    return Err(ModelError::UnknownParent { node: n.name.clone(), parent: p.clone() });
                }
            }
            let expected: usize =
                n.parents.iter().map(|p| nodes[index[p]].states.len()).product::<usize>() * n.states.len();
            if n.table.len() != expected {
                return Err(ModelError::TableArity { node: n.name.clone(), expected, found: n.table.len() });
            }
        }
        if let Some(v) = x_vars.intersection(&mp_vars).next() {
            return Err(ModelError::KindClash(v.clone()));
        }
        let topo = topological_order(&nodes, &index)?;
        let b = ConstrainedBN {
            nodes,
            index,
            topo,
            x_vars,
            mp_vars,
            user_constraints,
            marginals: BTreeMap::new(),
            definitions: BTreeMap::new(),
            options,
        };
        for n in &b.nodes {
            for t in &n.table {
                for v in t.vars() {
                    if b.mp_vars.contains(&v) {
                        return Err(ModelError::MarginalVarInTable { node: n.name.clone(), var: v });
                    }
                    if !b.x_vars.contains(&v) {
                        return Err(ModelError::UndeclaredVariable {
                            var: v,
                            context: format!("table of node '{}'", n.name),
                        });
                    }
                }
            }
        }
        Ok(b)
    }

    fn check_declared(&self) -> Result<(), ModelError> {
        for c in &self.user_constraints {
            for v in c.vars() {
                if !self.is_declared(&v) {
                    return Err(ModelError::UndeclaredVariable { var: v, context: format!("constraint '{c}'") });
                }
            }
        }
        Ok(())
    }

    fn define_marginal(&mut self, mp: Name, spec: MarginalSpec) -> Result<(), ModelError> {
        let def = inference::symbolic_marginal(self, &spec, &self.options)
            .map_err(|source| ModelError::Inference { mp: mp.clone(), source })?;
        self.definitions.insert(mp.clone(), def.with_name(mp.clone()));
        self.marginals.insert(mp, spec);
        Ok(())
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn node(&self, name: &str) -> Option<&NodeSpec> {
        self.index.get(name).map(|&i| &self.nodes[i])
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Node indices, parents before children.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn x_vars(&self) -> &BTreeSet<Name> {
        &self.x_vars
    }

    pub fn mp_vars(&self) -> &BTreeSet<Name> {
        &self.mp_vars
    }

    /// All of `X`, sorted by name.
    pub fn variables(&self) -> BTreeSet<Name> {
        self.x_vars.union(&self.mp_vars).cloned().collect()
    }

    pub fn kind_of(&self, v: &str) -> Option<VarKind> {
        if self.x_vars.contains(v) {
            Some(VarKind::Prob)
        } else if self.mp_vars.contains(v) {
            Some(VarKind::Marginal)
        } else {
            None
        }
    }

    pub fn is_declared(&self, v: &str) -> bool {
        self.kind_of(v).is_some()
    }

    pub fn user_constraints(&self) -> &[Constraint] {
        &self.user_constraints
    }

    /// The full constraint set `C`: user constraints, then generated marginal definitions.
    pub fn constraints(&self) -> Vec<Constraint> {
        let mut out = self.user_constraints.clone();
        for def in self.definitions.values() {
            out.extend(def.constraints.iter().cloned());
        }
        out
    }

    pub fn marginals(&self) -> &BTreeMap<Name, MarginalSpec> {
        &self.marginals
    }

    pub fn definitions(&self) -> &BTreeMap<Name, MarginalDefinition> {
        &self.definitions
    }

    pub fn options(&self) -> &InferenceOptions {
        &self.options
    }

    /// A copy of this model with extra user constraints appended. Variables they
    /// mention that are not yet declared become probability variables.
    pub fn with_constraints<I: IntoIterator<Item = Constraint>>(&self, extra: I) -> ConstrainedBN {
        let mut b = self.clone();
        for c in extra {
            for v in c.vars() {
                if !b.is_declared(&v) {
                    b.x_vars.insert(v);
                }
            }
            b.user_constraints.push(c);
        }
        b
    }

    /// Returns `self` extended with marginal variable `name` denoting `spec`; its
    /// defining constraints are generated and appended to `C`.
    pub fn install_marginal(&self, spec: &MarginalSpec, name: &str) -> Result<ConstrainedBN, ModelError> {
        let name: Name = name.into();
        if self.is_declared(&name) || self.index.contains_key(&name) {
            return Err(ModelError::NameCollision(name));
        }
        let mut b = self.clone();
        b.mp_vars.insert(name.clone());
        b.define_marginal(name, spec.clone())?;
        Ok(b)
    }

    /// Adds a marginal variable defined by hand-written user constraints.
    pub fn declare_marginal_var(&self, name: &str, defining: Vec<Constraint>) -> Result<ConstrainedBN, ModelError> {
        let name: Name = name.into();
        if self.is_declared(&name) {
            return Err(ModelError::NameCollision(name));
        }
        let mut b = self.clone();
        b.mp_vars.insert(name);
        b.user_constraints.extend(defining);
        b.check_declared()?;
        Ok(b)
    }

    /// Renames nodes and variables. Marginal definitions are renamed, not recomputed.
    pub(crate) fn renamed(&self, nodes: &BTreeMap<Name, Name>, vars: &BTreeMap<Name, Name>) -> ConstrainedBN {
        let rn = |n: &Name| nodes.get(n).cloned().unwrap_or_else(|| n.clone());
        let rv = |v: &Name| vars.get(v).cloned().unwrap_or_else(|| v.clone());
        let new_nodes: Vec<NodeSpec> = self
            .nodes
            .iter()
            .map(|n| {
                let mut m = n.map_table(|t| t.rename(vars));
                m.name = rn(&n.name);
                m.parents = n.parents.iter().map(rn).collect();
                m
            })
            .collect();
        let index = new_nodes.iter().enumerate().map(|(i, n)| (n.name.clone(), i)).collect();
        let marginals = self
            .marginals
            .iter()
            .map(|(mp, s)| {
                let spec = MarginalSpec {
                    node: rn(&s.node),
                    state: s.state.clone(),
                    evidence: s.evidence.iter().map(|(k, v)| (rn(k), v.clone())).collect(),
                };
                (rv(mp), spec)
            })
            .collect();
        let definitions = self.definitions.iter().map(|(mp, d)| (rv(mp), d.renamed(vars))).collect();
        ConstrainedBN {
            nodes: new_nodes,
            index,
            topo: self.topo.clone(),
            x_vars: self.x_vars.iter().map(rv).collect(),
            mp_vars: self.mp_vars.iter().map(rv).collect(),
            user_constraints: self.user_constraints.iter().map(|c| c.rename(vars)).collect(),
            marginals,
            definitions,
            options: self.options.clone(),
        }
    }

    /// Disjoint union of two models with an extra constraint list. Names must already be disjoint.
    pub(crate) fn disjoint_union(left: &ConstrainedBN, right: &ConstrainedBN, links: Vec<Constraint>) -> Result<ConstrainedBN, ModelError> {
        let mut nodes = left.nodes.clone();
        nodes.extend(right.nodes.iter().cloned());
        let x_vars: BTreeSet<Name> = left.x_vars.union(&right.x_vars).cloned().collect();
        let mp_vars: BTreeSet<Name> = left.mp_vars.union(&right.mp_vars).cloned().collect();
        let mut user = left.user_constraints.clone();
        user.extend(right.user_constraints.iter().cloned());
        let mut b = ConstrainedBN::from_parts_unchecked(nodes, x_vars, mp_vars, user, left.options.clone())?;
        for (mp, s) in left.marginals.iter().chain(&right.marginals) {
            if b.marginals.insert(mp.clone(), s.clone()).is_some() {
                return Err(ModelError::NameCollision(mp.clone()));
            }
        }
        b.definitions = left.definitions.clone();
        b.definitions.extend(right.definitions.iter().map(|(k, v)| (k.clone(), v.clone())));
        Ok(b.with_constraints(links))
    }
}

fn topological_order(nodes: &[NodeSpec], index: &BTreeMap<Name, usize>) -> Result<Vec<usize>, ModelError> {
    let n = nodes.len();
    let mut indegree = vec![0usize; n];
    let mut children = vec![Vec::new(); n];
    for (i, node) in nodes.iter().enumerate() {
        for p in &node.parents {
            let pi = index[p];
            children[pi].push(i);
            indegree[i] += 1;
        }
    }
    let mut ready: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_front() {
        order.push(i);
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push_back(c);
            }
        }
    }
    if order.len() < n {
        let cyclic = (0..n).filter(|&i| indegree[i] > 0).map(|i| nodes[i].name.clone()).collect();
        return Err(ModelError::Cycle(cyclic));
    }
    Ok(order)
}
