//! Constrained union of two models: the disjoint union of their graphs, with
//! constraint set `C₁ ∪ C₂ ∪ C` for link constraints `C`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::logic::{judge_may, judge_must, DecisionProcedure, LogicError, Status, Truth};
use crate::model::{check_sound, defining_equations, validate_well_formed, ConstrainedBN, ModelError, SoundVerdict, Violation};
use crate::terms::{Constraint, Name};

/// How name clashes between the operands are handled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RenamePolicy {
    RejectCollisions,
    /// A clashing name `n` becomes `n + left` in the left operand and `n + right`
    /// in the right one.
    AutoSuffix { left: String, right: String },
}

#[derive(Clone, Debug)]
pub struct UnionRecipe {
    pub left: ConstrainedBN,
    pub right: ConstrainedBN,
    /// Written against post-rename names.
    pub links: Vec<Constraint>,
    pub policy: RenamePolicy,
}

/// Old name → new name, for the names that changed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RenameMap {
    pub left_nodes: BTreeMap<Name, Name>,
    pub left_vars: BTreeMap<Name, Name>,
    pub right_nodes: BTreeMap<Name, Name>,
    pub right_vars: BTreeMap<Name, Name>,
}

impl RenameMap {
    pub fn is_empty(&self) -> bool {
        self.left_nodes.is_empty() && self.left_vars.is_empty() && self.right_nodes.is_empty() && self.right_vars.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Composition {
    pub model: ConstrainedBN,
    pub renames: RenameMap,
}

impl Composition {
    /// Composed models are checked for soundness rather than assumed sound.
    pub fn check_sound(&self, oracle: &mut dyn DecisionProcedure) -> Result<SoundVerdict, LogicError> {
        Ok(check_sound(&self.model, oracle)?)
    }
}

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("node name collision: '{0}'")]
    NodeCollision(Name),
    #[error("variable name collision: '{0}'")]
    VariableCollision(Name),
    #[error("rename suffixes must differ")]
    SameSuffix,
    #[error("link constraint redefines marginal '{mp}': {link}")]
    LinkRedefinesMarginal { mp: Name, link: String },
    #[error("composed model is ill-formed: {}", list(.0))]
    IllFormed(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

fn collision_map(clashes: &BTreeSet<Name>, suffix: &str) -> BTreeMap<Name, Name> {
    if suffix.is_empty() {
        return BTreeMap::new();
    }
    clashes.iter().map(|n| (n.clone(), Name::from(format!("{n}{suffix}").as_str()))).collect()
}

fn node_names(b: &ConstrainedBN) -> BTreeSet<Name> {
    b.nodes().iter().map(|n| n.name.clone()).collect()
}

/// `left ∪_C right`. The result is re-validated for well-formedness.
pub fn union(recipe: &UnionRecipe) -> Result<Composition, ComposeError> {
    let (ln, rn) = (node_names(&recipe.left), node_names(&recipe.right));
    let (lv, rv) = (recipe.left.variables(), recipe.right.variables());
    let node_clash: BTreeSet<Name> = ln.intersection(&rn).cloned().collect();
    let var_clash: BTreeSet<Name> = lv.intersection(&rv).cloned().collect();

    let renames = match &recipe.policy {
        RenamePolicy::RejectCollisions => {
            if let Some(n) = node_clash.first() {
                return Err(ComposeError::NodeCollision(n.clone()));
            }
            if let Some(v) = var_clash.first() {
                return Err(ComposeError::VariableCollision(v.clone()));
            }
            RenameMap::default()
        }
        RenamePolicy::AutoSuffix { left, right } => {
            if left == right {
                return Err(ComposeError::SameSuffix);
            }
            RenameMap {
                left_nodes: collision_map(&node_clash, left),
                left_vars: collision_map(&var_clash, left),
                right_nodes: collision_map(&node_clash, right),
                right_vars: collision_map(&var_clash, right),
            }
        }
    };
    let left = recipe.left.renamed(&renames.left_nodes, &renames.left_vars);
    let right = recipe.right.renamed(&renames.right_nodes, &renames.right_vars);
    if let Some(n) = node_names(&left).intersection(&node_names(&right)).next() {
        return Err(ComposeError::NodeCollision(n.clone()));
    }
    if let Some(v) = left.variables().intersection(&right.variables()).next() {
        return Err(ComposeError::VariableCollision(v.clone()));
    }

    let mp_vars: BTreeSet<Name> = left.mp_vars().union(right.mp_vars()).cloned().collect();
    if let Some(d) = defining_equations(&recipe.links, &mp_vars).into_iter().next() {
        let link = recipe
            .links
            .iter()
            .find(|c| !defining_equations(std::slice::from_ref(*c), &mp_vars).is_empty())
            .map(|c| c.to_string())
            .unwrap_or_default();
        return Err(ComposeError::LinkRedefinesMarginal { mp: d.mp, link });
    }

    let model = ConstrainedBN::disjoint_union(&left, &right, recipe.links.clone())?;
    let violations = validate_well_formed(&model);
    if !violations.is_empty() {
        return Err(ComposeError::IllFormed(violations));
    }
    Ok(Composition { model, renames })
}

/// Shorthand for a collision-rejecting union.
pub fn union_of(left: &ConstrainedBN, right: &ConstrainedBN, links: &[Constraint]) -> Result<ConstrainedBN, ComposeError> {
    let recipe = UnionRecipe {
        left: left.clone(),
        right: right.clone(),
        links: links.to_vec(),
        policy: RenamePolicy::RejectCollisions,
    };
    Ok(union(&recipe)?.model)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    Associativity,
    Symmetry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    May,
    Must,
}

/// One judgment evaluated on both sides of a law.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub law: Law,
    pub mode: Mode,
    pub phi: String,
    pub left: Truth,
    pub right: Truth,
}

impl LawCheck {
    /// Definite verdicts that differ; `unknown` on either side is not a disagreement.
    pub fn disagrees(&self) -> bool {
        self.left != Truth::Unknown && self.right != Truth::Unknown && self.left != self.right
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct UnionLawReport {
    pub checks: Vec<LawCheck>,
    /// Compositions that could not be formed, with the reason.
    pub errors: Vec<String>,
}

impl UnionLawReport {
    pub fn disagreements(&self) -> Vec<&LawCheck> {
        self.checks.iter().filter(|c| c.disagrees()).collect()
    }

    pub fn all_agree(&self) -> bool {
        self.errors.is_empty() && self.disagreements().is_empty()
    }
}

fn truth_of_may(s: Status) -> Truth {
    match s {
        Status::Sat => Truth::Holds,
        Status::Unsat => Truth::Fails,
        Status::Unknown => Truth::Unknown,
    }
}

fn judge(b: &ConstrainedBN, mode: Mode, phi: &Constraint, oracle: &mut dyn DecisionProcedure) -> Result<Truth, LogicError> {
    Ok(match mode {
        Mode::May => truth_of_may(judge_may(b, phi, oracle)?.status),
        Mode::Must => judge_must(b, phi, oracle)?.truth,
    })
}

fn compare(
    report: &mut UnionLawReport,
    law: Law,
    pair: (&ConstrainedBN, &ConstrainedBN),
    phis: &[Constraint],
    oracle: &mut dyn DecisionProcedure,
) -> Result<(), LogicError> {
    for phi in phis {
        for mode in [Mode::May, Mode::Must] {
            let left = judge(pair.0, mode, phi, oracle)?;
            let right = judge(pair.1, mode, phi, oracle)?;
            report.checks.push(LawCheck { law, mode, phi: phi.to_string(), left, right });
        }
    }
    Ok(())
}

/// Checks on the sampled formulas that `(b1 ∪_C b2) ∪_C' b3` and
/// `b1 ∪_C (b2 ∪_C' b3)` agree, and that `b1 ∪_C b2` and `b2 ∪_C b1` agree, for
/// both judgments. Names must be disjoint across the operands.
pub fn check_union_laws(
    b1: &ConstrainedBN,
    b2: &ConstrainedBN,
    b3: &ConstrainedBN,
    c: &[Constraint],
    c_prime: &[Constraint],
    phis: &[Constraint],
    oracle: &mut dyn DecisionProcedure,
) -> Result<UnionLawReport, LogicError> {
    let mut report = UnionLawReport::default();
    let assoc = union_of(b1, b2, c)
        .and_then(|l| union_of(&l, b3, c_prime))
        .and_then(|l| union_of(b2, b3, c_prime).and_then(|r| union_of(b1, &r, c)).map(|r| (l, r)));
    match assoc {
        Ok((l, r)) => compare(&mut report, Law::Associativity, (&l, &r), phis, oracle)?,
        Err(e) => report.errors.push(format!("associativity: {e}")),
    }
    match union_of(b1, b2, c).and_then(|l| union_of(b2, b1, c).map(|r| (l, r))) {
        Ok((l, r)) => {
            let relevant: Vec<Constraint> = phis
                .iter()
                .filter(|p| p.vars().iter().all(|v| l.is_declared(v)))
                .cloned()
                .collect();
            compare(&mut report, Law::Symmetry, (&l, &r), &relevant, oracle)?
        }
        Err(e) => report.errors.push(format!("symmetry: {e}")),
    }
    Ok(report)
}
