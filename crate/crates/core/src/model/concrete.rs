//! Concretization: evaluating every table term at an assignment satisfying `C`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::validate::defining_equations;
use super::ConstrainedBN;
use crate::rational::Rational;
use crate::terms::{evaluate, holds, Assignment, EvalError, Name};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConcretizeError {
    #[error("assignment does not bind '{0}'")]
    Unbound(Name),
    #[error("marginal variable '{0}' is not determined by its definition at this assignment")]
    Undetermined(Name),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("node '{node}' row {row}: entry for '{state}' is {value}, outside [0,1]")]
    EntryOutOfRange { node: Name, row: usize, state: Name, value: Rational },
    #[error("node '{node}' row {row} sums to {sum}, not 1")]
    RowSum { node: Name, row: usize, sum: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteNode {
    pub name: Name,
    pub states: Vec<Name>,
    pub parents: Vec<Name>,
    /// Row-major as in [`super::NodeSpec`].
    pub table: Vec<Rational>,
}

impl ConcreteNode {
    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.table.chunks(self.states.len())
    }
}

/// A Bayesian network with exact rational tables (every entry in `[0,1]`, rows sum to 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteBN {
    nodes: Vec<ConcreteNode>,
    index: BTreeMap<Name, usize>,
    topo: Vec<usize>,
}

impl ConcreteBN {
    pub fn nodes(&self) -> &[ConcreteNode] {
        &self.nodes
    }

    pub fn node(&self, name: &str) -> Option<&ConcreteNode> {
        self.index.get(name).map(|&i| &self.nodes[i])
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Table value of node `i` given the state indices of every node.
    pub fn entry(&self, i: usize, states: &[usize]) -> &Rational {
        let n = &self.nodes[i];
        let mut row = 0;
        for p in &n.parents {
            let pi = self.index[p];
            row = row * self.nodes[pi].states.len() + states[pi];
        }
        &n.table[row * n.states.len() + states[i]]
    }

    /// Entry value for a table key given by labels, e.g. `entry_by_label("Rain", &[], "T")`.
    pub fn entry_by_label(&self, node: &str, parent_states: &[&str], state: &str) -> Option<&Rational> {
        let n = self.node(node)?;
        let mut row = 0;
        for (p, label) in n.parents.iter().zip(parent_states) {
            let pn = self.node(p)?;
            row = row * pn.states.len() + pn.states.iter().position(|s| s.as_ref() == *label)?;
        }
        let col = n.states.iter().position(|s| s.as_ref() == state)?;
        n.table.get(row * n.states.len() + col)
    }
}

/// Extends an assignment of `X_x` with the values of every marginal variable its
/// definition determines (`mp = N` or `mp = N/D`).
pub fn complete_assignment(b: &ConstrainedBN, a: &Assignment) -> Result<Assignment, ConcretizeError> {
    let mut full = a.clone();
    for x in b.x_vars() {
        if !full.contains_key(x) {
            return Err(ConcretizeError::Unbound(x.clone()));
        }
    }
    let defs = defining_equations(&b.constraints(), b.mp_vars());
    // Definitions may chain through other marginal variables in ill-formed models;
    // iterate until no progress.
    loop {
        let mut progress = false;
        for mp in b.mp_vars() {
            if full.contains_key(mp) {
                continue;
            }
            let Some(d) = defs.iter().find(|d| &d.mp == mp) else {
                return Err(ConcretizeError::Undetermined(mp.clone()));
            };
            if !d.other_vars().iter().all(|v| full.contains_key(v)) {
                continue;
            }
            let rhs = evaluate(&d.rhs, &full)?;
            let value = match &d.factor {
                None => rhs,
                Some(f) => {
                    let f = evaluate(f, &full)?;
                    if f.is_zero() {
                        return Err(ConcretizeError::Undetermined(mp.clone()));
                    }
                    rhs / f
                }
            };
            full.insert(mp.clone(), value);
            progress = true;
        }
        if !progress {
            break;
        }
    }
    if let Some(mp) = b.mp_vars().iter().find(|mp| !full.contains_key(*mp)) {
        return Err(ConcretizeError::Undetermined(mp.clone()));
    }
    Ok(full)
}

/// `B[α]`: checks `α ⊨ C` exactly, evaluates every table and verifies the result is
/// a Bayesian network.
pub fn concretize(b: &ConstrainedBN, a: &Assignment) -> Result<ConcreteBN, ConcretizeError> {
    let full = complete_assignment(b, a)?;
    for c in b.constraints() {
        if !holds(&c, &full)? {
            return Err(ConcretizeError::ConstraintViolated(c.to_string()));
        }
    }
    let mut nodes = Vec::with_capacity(b.nodes().len());
    for n in b.nodes() {
        let table = n.table().iter().map(|t| evaluate(t, &full)).collect::<Result<Vec<_>, _>>()?;
        let node = ConcreteNode { name: n.name.clone(), states: n.states.clone(), parents: n.parents.clone(), table };
        check_rows(&node)?;
        nodes.push(node);
    }
    let index = nodes.iter().enumerate().map(|(i, n)| (n.name.clone(), i)).collect();
    Ok(ConcreteBN { nodes, index, topo: b.topological_order().to_vec() })
}

fn check_rows(n: &ConcreteNode) -> Result<(), ConcretizeError> {
    for (row, entries) in n.rows().enumerate() {
        for (state, v) in n.states.iter().zip(entries) {
            if v.is_negative() || *v > Rational::one() {
                return Err(ConcretizeError::EntryOutOfRange {
                    node: n.name.clone(),
                    row,
                    state: state.clone(),
                    value: v.clone(),
                });
            }
        }
        let sum: Rational = entries.iter().sum();
        if !sum.is_one() {
            return Err(ConcretizeError::RowSum { node: n.name.clone(), row, sum });
        }
    }
    Ok(())
}
