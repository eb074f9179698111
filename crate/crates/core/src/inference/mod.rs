//! Symbolic marginals by a division-free junction tree over polynomial potentials,
//! and an exact brute-force oracle over concrete networks.
//!
//! Two-pass sum-product message passing keeps every potential a polynomial. An
//! unconditional marginal is the collected mass at the target state (`mp = N`);
//! a conditional one is a quotient `N/D` of two such sums, stated without division
//! as `mp*D = N` together with `D > 0` when `D` is not constant.

mod factor;
mod graph;
mod joint;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::model::{ConstrainedBN, MarginalSpec, ModelError};
use crate::terms::{to_rational_fn, Constraint, Name, Polynomial, RationalFn, Term};

pub use factor::Factor;
pub use graph::{build_junction_tree, moralize, triangulate, JunctionTree, Triangulation, UndirectedGraph};
pub use joint::{enumerate_joint, query_joint, Joint, DEFAULT_JOINT_CAP};

pub const DEFAULT_WIDTH_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("unknown node '{0}'")]
    UnknownNode(Name),
    #[error("node '{node}' has no state '{state}'")]
    UnknownState { node: Name, state: Name },
    #[error("target node '{0}' is also observed")]
    TargetInEvidence(Name),
    #[error("clique {clique:?} has {size} joint states, above the width cap {cap}")]
    WidthExceeded { clique: Vec<Name>, size: usize, cap: usize },
    #[error("table entry of node '{0}' is not a polynomial in the probability variables")]
    NonPolynomialEntry(Name),
    #[error("the evidence has probability identically zero")]
    ZeroEvidence,
    #[error("joint state space of {size} states exceeds the cap {cap}")]
    JointCap { size: usize, cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferenceOptions {
    /// Upper bound on the number of joint states of any clique.
    pub width_cap: usize,
    /// Emit `D > 0` alongside `mp*D = N` for non-constant `D`.
    pub denominator_guard: bool,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        InferenceOptions { width_cap: DEFAULT_WIDTH_CAP, denominator_guard: true }
    }
}

/// The defining equation of one marginal variable: `mp = N` when `D = 1`, otherwise
/// `mp*D = N` (plus `D > 0` under the denominator guard).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalDefinition {
    pub mp: Name,
    pub numerator: Polynomial,
    pub denominator: Polynomial,
    pub constraints: Vec<Constraint>,
    pub guarded: bool,
}

impl MarginalDefinition {
    pub fn new(mp: Name, quotient: RationalFn, guard: bool) -> MarginalDefinition {
        let (numerator, denominator) = quotient.into_parts();
        let mut def = MarginalDefinition { mp, numerator, denominator, constraints: Vec::new(), guarded: guard };
        def.constraints = def.build_constraints();
        def
    }

    fn build_constraints(&self) -> Vec<Constraint> {
        let n = self.numerator.to_term();
        if self.denominator.is_one() {
            return vec![Constraint::Eq(Term::Var(self.mp.clone()), n)];
        }
        let d = self.denominator.to_term();
        let mut out = vec![Constraint::Eq(Term::Var(self.mp.clone()) * d.clone(), n)];
        if self.guarded {
            out.push(Constraint::Gt(d, Term::int(0)));
        }
        out
    }

    pub fn with_name(mut self, mp: Name) -> MarginalDefinition {
        self.mp = mp;
        self.constraints = self.build_constraints();
        self
    }

    pub(crate) fn renamed(&self, vars: &BTreeMap<Name, Name>) -> MarginalDefinition {
        let mut def = MarginalDefinition {
            mp: vars.get(&self.mp).cloned().unwrap_or_else(|| self.mp.clone()),
            numerator: self.numerator.rename(vars),
            denominator: self.denominator.rename(vars),
            constraints: Vec::new(),
            guarded: self.guarded,
        };
        def.constraints = def.build_constraints();
        def
    }

    pub fn quotient(&self) -> RationalFn {
        RationalFn::new(self.numerator.clone(), self.denominator.clone()).expect("denominator is nonzero")
    }
}

/// Junction tree with clique potentials built from the symbolic tables.
#[derive(Clone, Debug)]
pub struct CompiledNetwork {
    pub names: Vec<Name>,
    pub cards: Vec<usize>,
    pub moral: UndirectedGraph,
    pub triangulation: Triangulation,
    pub tree: JunctionTree,
    /// Initial potential of each clique: product of the tables assigned to it.
    pub potentials: Vec<Factor>,
    /// The clique each node's table was assigned to.
    pub home: Vec<usize>,
}

pub fn compile(b: &ConstrainedBN, opts: &InferenceOptions) -> Result<CompiledNetwork, InferenceError> {
    let names: Vec<Name> = b.nodes().iter().map(|n| n.name.clone()).collect();
    let cards: Vec<usize> = b.nodes().iter().map(|n| n.states.len()).collect();
    let parents: Vec<Vec<usize>> = b
        .nodes()
        .iter()
        .map(|n| n.parents.iter().map(|p| b.node_index(p).expect("parent exists")).collect())
        .collect();
    let moral = moralize(names.clone(), &parents);
    let triangulation = triangulate(&moral);
    for c in &triangulation.cliques {
        let size = c.iter().try_fold(1usize, |acc, &v| acc.checked_mul(cards[v])).unwrap_or(usize::MAX);
        if size > opts.width_cap {
            return Err(InferenceError::WidthExceeded {
                clique: c.iter().map(|&v| names[v].clone()).collect(),
                size,
                cap: opts.width_cap,
            });
        }
    }
    let tree = build_junction_tree(triangulation.cliques.clone());
    let mut potentials: Vec<Factor> = tree
        .cliques
        .iter()
        .map(|c| {
            let vars: Vec<usize> = c.iter().copied().collect();
            let cs = vars.iter().map(|&v| cards[v]).collect();
            Factor::ones(vars, cs)
        })
        .collect();
    let mut home = Vec::with_capacity(names.len());
    for (i, node) in b.nodes().iter().enumerate() {
        let mut scope = parents[i].clone();
        scope.push(i);
        let h = tree
            .cliques
            .iter()
            .position(|c| scope.iter().all(|v| c.contains(v)))
            .expect("every family lies in some clique of a triangulated moral graph");
        let values = node
            .table()
            .iter()
            .map(|t| {
                let r = to_rational_fn(t).map_err(|_| InferenceError::NonPolynomialEntry(node.name.clone()))?;
                if r.is_polynomial() {
                    Ok(r.into_parts().0)
                } else {
                    Err(InferenceError::NonPolynomialEntry(node.name.clone()))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let scope_cards: Vec<usize> = scope.iter().map(|&v| cards[v]).collect();
        let cpt = Factor::from_unsorted(&scope, &scope_cards, values);
        potentials[h] = potentials[h].product(&cpt);
        home.push(h);
    }
    Ok(CompiledNetwork { names, cards, moral, triangulation, tree, potentials, home })
}

impl CompiledNetwork {
    fn with_evidence(&self, evidence: &[(usize, usize)]) -> Vec<Factor> {
        let mut pots = self.potentials.clone();
        for &(v, s) in evidence {
            pots[self.home[v]].restrict(v, s);
        }
        pots
    }

    fn message(&self, pots: &[Factor], msgs: &HashMap<(usize, usize), Factor>, from: usize, to: usize) -> Factor {
        let mut f = pots[from].clone();
        for k in self.tree.neighbors(from) {
            if k != to {
                f = f.product(&msgs[&(k, from)]);
            }
        }
        let sep: Vec<usize> = self.tree.separator(from, to).into_iter().collect();
        f.marginalize_to(&sep)
    }

    /// Edges directed towards `root`, leaves first.
    fn collect_schedule(&self, root: usize) -> Vec<(usize, usize)> {
        let mut order = Vec::new();
        let mut stack = vec![(root, usize::MAX)];
        while let Some((u, parent)) = stack.pop() {
            if parent != usize::MAX {
                order.push((u, parent));
            }
            for w in self.tree.neighbors(u) {
                if w != parent {
                    stack.push((w, u));
                }
            }
        }
        order.reverse();
        order
    }

    fn belief(&self, pots: &[Factor], msgs: &HashMap<(usize, usize), Factor>, i: usize) -> Factor {
        self.tree.neighbors(i).into_iter().fold(pots[i].clone(), |acc, k| acc.product(&msgs[&(k, i)]))
    }

    /// Two-pass propagation; returns the belief of every clique under hard `evidence`
    /// given as `(node index, state index)` pairs.
    pub fn propagate(&self, evidence: &[(usize, usize)]) -> Vec<Factor> {
        let pots = self.with_evidence(evidence);
        let mut msgs = HashMap::new();
        let inward = self.collect_schedule(0);
        for &(from, to) in &inward {
            let m = self.message(&pots, &msgs, from, to);
            msgs.insert((from, to), m);
        }
        for &(to, from) in inward.iter().rev() {
            let m = self.message(&pots, &msgs, from, to);
            msgs.insert((from, to), m);
        }
        (0..self.tree.cliques.len()).map(|i| self.belief(&pots, &msgs, i)).collect()
    }

    /// Collect-only pass to the clique `root`; returns its belief.
    pub fn collect(&self, evidence: &[(usize, usize)], root: usize) -> Factor {
        let pots = self.with_evidence(evidence);
        let mut msgs = HashMap::new();
        for (from, to) in self.collect_schedule(root) {
            let m = self.message(&pots, &msgs, from, to);
            msgs.insert((from, to), m);
        }
        self.belief(&pots, &msgs, root)
    }

    /// Smallest clique containing node `v`.
    pub fn clique_of(&self, v: usize) -> usize {
        (0..self.tree.cliques.len())
            .filter(|&i| self.tree.cliques[i].contains(&v))
            .min_by_key(|&i| (self.tree.cliques[i].len(), i))
            .expect("every node lies in a clique")
    }
}

/// Node index, state index pairs for a spec's target and evidence.
pub(crate) fn resolve_spec(b: &ConstrainedBN, spec: &MarginalSpec) -> Result<((usize, usize), Vec<(usize, usize)>), InferenceError> {
    let locate = |node: &Name, state: &Name| -> Result<(usize, usize), InferenceError> {
        let i = b.node_index(node).ok_or_else(|| InferenceError::UnknownNode(node.clone()))?;
        let s = b.nodes()[i]
            .state_index(state)
            .ok_or_else(|| InferenceError::UnknownState { node: node.clone(), state: state.clone() })?;
        Ok((i, s))
    };
    if spec.evidence.contains_key(&spec.node) {
        return Err(InferenceError::TargetInEvidence(spec.node.clone()));
    }
    let target = locate(&spec.node, &spec.state)?;
    let evidence = spec.evidence.iter().map(|(n, s)| locate(n, s)).collect::<Result<Vec<_>, _>>()?;
    Ok((target, evidence))
}

/// `N` and `D` of `p(target | evidence)` as polynomials over `X_x`; `D = 1` when
/// there is no evidence.
pub fn marginal_quotient(
    compiled: &CompiledNetwork,
    target: (usize, usize),
    evidence: &[(usize, usize)],
) -> Result<RationalFn, InferenceError> {
    let root = compiled.clique_of(target.0);
    let belief = compiled.collect(evidence, root).marginalize_to(&[target.0]);
    let num = belief.values()[target.1].clone();
    if evidence.is_empty() {
        return Ok(RationalFn::from_poly(num));
    }
    let den = belief.values().iter().fold(Polynomial::zero(), |acc, v| &acc + v);
    RationalFn::new(num, den).map_err(|_| InferenceError::ZeroEvidence)
}

/// The defining constraints of the marginal `spec` (named `mp` until installed).
pub fn symbolic_marginal(b: &ConstrainedBN, spec: &MarginalSpec, opts: &InferenceOptions) -> Result<MarginalDefinition, InferenceError> {
    let (target, evidence) = resolve_spec(b, spec)?;
    let compiled = compile(b, opts)?;
    let q = marginal_quotient(&compiled, target, &evidence)?;
    Ok(MarginalDefinition::new(Name::from("mp"), q, opts.denominator_guard))
}

/// `b` extended with marginal variable `name` denoting `spec`.
pub fn install_marginal(b: &ConstrainedBN, spec: &MarginalSpec, name: &str) -> Result<ConstrainedBN, ModelError> {
    b.install_marginal(spec, name)
}
