//! may/must judgments and consistency by reduction to satisfiability of the
//! existential closure of `φ ∧ ⋀C` over all model variables.

mod smt;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::ConstrainedBN;
use crate::rational::{parse_decimal, render, Rational};
use crate::terms::{violation, Assignment, Constraint, Name, Query};

pub use smt::{
    eliminate_division, emit_constraint, emit_script, real_literal, smt_symbol, DecisionProcedure, SatResult, SmtSolver,
    SolverConfig, SolverError, DEFAULT_TIMEOUT_MS,
};

/// Largest exact constraint violation a witness may show before it is rejected.
pub fn residual_tolerance() -> Rational {
    parse_decimal("1e-7").expect("literal")
}

#[derive(Debug, Error)]
pub enum LogicError {
    #[error("variable not in X: '{0}'")]
    UnknownVariable(Name),
    #[error("unsupported: non-prenex query")]
    NonPrenex,
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Unknown => "unknown",
        })
    }
}

/// Rational assignment returned by the solver, with the largest exact violation
/// of the checked constraints at that assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub values: Assignment,
    pub residual: Rational,
}

impl Witness {
    pub fn get(&self, v: &str) -> Option<&Rational> {
        self.values.get(v)
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.values.len() + 1))?;
        for (k, v) in &self.values {
            m.serialize_entry(k.as_ref(), &render(v))?;
        }
        m.serialize_entry("residual", &render(&self.residual))?;
        m.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    /// Present iff `status` is `Sat`.
    pub witness: Option<Witness>,
    /// Why the verdict is `Unknown`.
    pub reason: Option<String>,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }

    pub fn is_unsat(&self) -> bool {
        self.status == Status::Unsat
    }

    fn unknown(reason: String) -> Verdict {
        Verdict { status: Status::Unknown, witness: None, reason: Some(reason) }
    }
}

/// Three-valued outcome of a judgment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    Holds,
    Fails,
    Unknown,
}

/// Result of a must-judgment: when it fails, `counterexample` satisfies `¬φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MustVerdict {
    pub truth: Truth,
    pub counterexample: Option<Witness>,
    /// The judgment holds only because the model has no concretization.
    pub vacuous: bool,
    pub reason: Option<String>,
}

pub const VACUOUS_WARNING: &str = "vacuous: model inconsistent";

/// Decides `∃ vars. ⋀ assertions`, validating any witness by exact re-evaluation.
pub fn decide(
    oracle: &mut dyn DecisionProcedure,
    vars: &BTreeSet<Name>,
    assertions: &[Constraint],
) -> Result<Verdict, SolverError> {
    match oracle.check(vars, assertions)? {
        SatResult::Unsat => Ok(Verdict { status: Status::Unsat, witness: None, reason: None }),
        SatResult::Unknown(r) => Ok(Verdict::unknown(r)),
        SatResult::Sat(values) => {
            let mut worst = Rational::zero();
            for c in assertions {
                match violation(c, &values) {
                    Ok(Some(v)) => worst = worst.max(v),
                    Ok(None) => return Ok(Verdict::unknown(format!("witness violates '{c}' unboundedly"))),
                    Err(e) => return Ok(Verdict::unknown(format!("witness cannot be evaluated: {e}"))),
                }
            }
            if worst > residual_tolerance() {
                return Ok(Verdict::unknown(format!("witness residual {} exceeds 1e-7", render(&worst))));
            }
            Ok(Verdict { status: Status::Sat, witness: Some(Witness { values, residual: worst }), reason: None })
        }
    }
}

fn check_vars(b: &ConstrainedBN, phi: &Constraint, extra: &BTreeSet<Name>) -> Result<(), LogicError> {
    for v in phi.vars() {
        if !b.is_declared(&v) && !extra.contains(&v) {
            return Err(LogicError::UnknownVariable(v));
        }
    }
    Ok(())
}

/// `∃x1 … ∃xn. φ ∧ ⋀C` over all of `X` in name order.
pub fn build_may_formula(b: &ConstrainedBN, phi: &Constraint) -> Result<Query, LogicError> {
    check_vars(b, phi, &BTreeSet::new())?;
    let vars: Vec<Name> = b.variables().into_iter().collect();
    let matrix = b.constraints().into_iter().fold(phi.clone(), Constraint::and);
    Ok(Query::exists_closure(&vars, matrix))
}

fn assertions(b: &ConstrainedBN, phi: &Constraint) -> Vec<Constraint> {
    let mut out = vec![phi.clone()];
    out.extend(b.constraints());
    out
}

/// `B ⊨may φ`: satisfiable iff some concretization satisfies `φ`.
pub fn judge_may(b: &ConstrainedBN, phi: &Constraint, oracle: &mut dyn DecisionProcedure) -> Result<Verdict, LogicError> {
    check_vars(b, phi, &BTreeSet::new())?;
    Ok(decide(oracle, &b.variables(), &assertions(b, phi))?)
}

/// may-judgment of a query in prenex-existential form; bound variables outside
/// `X` become additional existential variables.
pub fn judge_may_query(b: &ConstrainedBN, q: &Query, oracle: &mut dyn DecisionProcedure) -> Result<Verdict, LogicError> {
    let (bound, matrix) = q.as_prenex_existential().ok_or(LogicError::NonPrenex)?;
    let extra: BTreeSet<Name> = bound.into_iter().filter(|v| !b.is_declared(v)).collect();
    check_vars(b, matrix, &extra)?;
    let mut vars = b.variables();
    vars.extend(extra);
    Ok(decide(oracle, &vars, &assertions(b, matrix))?)
}

/// Consistency: satisfiable iff the model has a concretization.
pub fn check_consistent(b: &ConstrainedBN, oracle: &mut dyn DecisionProcedure) -> Result<Verdict, LogicError> {
    judge_may(b, &Constraint::True, oracle)
}

/// `B ⊨must φ` as `¬(B ⊨may ¬φ)`. When it holds, consistency is checked as well so
/// vacuous truth is flagged.
pub fn judge_must(b: &ConstrainedBN, phi: &Constraint, oracle: &mut dyn DecisionProcedure) -> Result<MustVerdict, LogicError> {
    let neg = judge_may(b, &phi.clone().negate(), oracle)?;
    Ok(match neg.status {
        Status::Sat => MustVerdict { truth: Truth::Fails, counterexample: neg.witness, vacuous: false, reason: None },
        Status::Unknown => MustVerdict { truth: Truth::Unknown, counterexample: None, vacuous: false, reason: neg.reason },
        Status::Unsat => {
            let consistent = check_consistent(b, oracle)?;
            match consistent.status {
                Status::Unsat => MustVerdict {
                    truth: Truth::Holds,
                    counterexample: None,
                    vacuous: true,
                    reason: Some(VACUOUS_WARNING.into()),
                },
                Status::Sat => MustVerdict { truth: Truth::Holds, counterexample: None, vacuous: false, reason: None },
                Status::Unknown => MustVerdict {
                    truth: Truth::Holds,
                    counterexample: None,
                    vacuous: false,
                    reason: Some(format!("consistency undetermined: {}", consistent.reason.unwrap_or_default())),
                },
            }
        }
    })
}
