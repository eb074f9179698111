//! Soundness: every concretization's tables are probability distributions.

use num_traits::{One, Signed};

use super::ConstrainedBN;
use crate::logic::{decide, DecisionProcedure, SolverError, Status, Witness};
use crate::rational::Rational;
use crate::terms::{simplify, Constraint, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SoundVerdict {
    Sound,
    UnsoundWitness(Witness),
    Unknown(String),
}

/// The disjunction of all ways a table can fail to be a distribution, omitting
/// entries and rows that are constant and fine. `None` if nothing remains.
pub fn unsoundness_condition(b: &ConstrainedBN) -> Option<Constraint> {
    let mut bad = Vec::new();
    for n in b.nodes() {
        for row in n.rows() {
            for t in row {
                let s = simplify(t);
                if let Term::Const(c) = &s {
                    if !c.is_negative() && *c <= Rational::one() {
                        continue;
                    }
                }
                bad.push(Constraint::Lt(t.clone(), Term::int(0)).or(Constraint::Gt(t.clone(), Term::int(1))));
            }
            let sum = row.iter().cloned().reduce(|a, b| a + b).expect("rows are nonempty");
            if matches!(simplify(&sum), Term::Const(c) if c.is_one()) {
                continue;
            }
            bad.push(Constraint::Eq(sum, Term::int(1)).negate());
        }
    }
    (!bad.is_empty()).then(|| Constraint::any(bad))
}

/// One satisfiability query for `∃X. ⋀C ∧ (some entry < 0 ∨ entry > 1 ∨ row sum ≠ 1)`.
pub fn check_sound(b: &ConstrainedBN, oracle: &mut dyn DecisionProcedure) -> Result<SoundVerdict, SolverError> {
    let Some(cond) = unsoundness_condition(b) else { return Ok(SoundVerdict::Sound) };
    let mut assertions = vec![cond];
    assertions.extend(b.constraints());
    let v = decide(oracle, &b.variables(), &assertions)?;
    Ok(match v.status {
        Status::Unsat => SoundVerdict::Sound,
        Status::Sat => SoundVerdict::UnsoundWitness(v.witness.expect("sat carries a witness")),
        Status::Unknown => SoundVerdict::Unknown(v.reason.unwrap_or_default()),
    })
}
