//! Well-formedness: every declared variable occurs in `C`, every variable of `C`
//! is declared, and each marginal variable has exactly one defining equation
//! `mp = t` or `mp*t = t'` whose other parts mention no marginal variable.

use std::collections::BTreeSet;
use std::fmt;

use super::ConstrainedBN;
use crate::terms::{Constraint, Name, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub var: Name,
    /// `"1(a)"` or `"1(b)"`.
    pub rule: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.var, self.message)
    }
}

/// A top-level equation of the shape `mp = rhs` (`factor` absent) or
/// `mp*factor = rhs` (either side, either operand order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefiningEquation {
    pub mp: Name,
    pub factor: Option<Term>,
    pub rhs: Term,
}

impl DefiningEquation {
    /// Variables of the non-`mp` parts.
    pub fn other_vars(&self) -> BTreeSet<Name> {
        let mut out = self.rhs.vars();
        if let Some(f) = &self.factor {
            f.collect_vars(&mut out);
        }
        out
    }
}

fn defined_side(side: &Term, mp_vars: &BTreeSet<Name>) -> Option<(Name, Option<Term>)> {
    match side {
        Term::Var(v) if mp_vars.contains(v) => Some((v.clone(), None)),
        Term::Mul(a, b) => match (a.as_ref(), b.as_ref()) {
            (Term::Var(v), other) if mp_vars.contains(v) => Some((v.clone(), Some(other.clone()))),
            (other, Term::Var(v)) if mp_vars.contains(v) => Some((v.clone(), Some(other.clone()))),
            _ => None,
        },
        _ => None,
    }
}

/// All defining equations among the top-level conjuncts of `constraints`.
pub fn defining_equations(constraints: &[Constraint], mp_vars: &BTreeSet<Name>) -> Vec<DefiningEquation> {
    let mut out = Vec::new();
    for c in constraints {
        for conj in c.conjuncts() {
            if let Constraint::Eq(l, r) = conj {
                if let Some((mp, factor)) = defined_side(l, mp_vars) {
                    out.push(DefiningEquation { mp, factor, rhs: r.clone() });
                }
                if let Some((mp, factor)) = defined_side(r, mp_vars) {
                    out.push(DefiningEquation { mp, factor, rhs: l.clone() });
                }
            }
        }
    }
    out
}

pub fn validate_well_formed(b: &ConstrainedBN) -> Vec<Violation> {
    let constraints = b.constraints();
    let mut occurring = BTreeSet::new();
    for c in &constraints {
        c.collect_vars(&mut occurring);
    }
    let declared = b.variables();
    let mut out = Vec::new();
    for v in declared.difference(&occurring) {
        out.push(Violation { var: v.clone(), rule: "1(a)", message: "1(a): declared but not occurring in C".into() });
    }
    for v in occurring.difference(&declared) {
        out.push(Violation { var: v.clone(), rule: "1(a)", message: "1(a): variable not in X".into() });
    }
    let defs = defining_equations(&constraints, b.mp_vars());
    for mp in b.mp_vars() {
        let mine: Vec<&DefiningEquation> = defs.iter().filter(|d| &d.mp == mp).collect();
        let message = match mine.as_slice() {
            [] => Some("1(b): no defining equation"),
            [d] if d.other_vars().iter().any(|v| b.mp_vars().contains(v)) => {
                Some("1(b): MarginalVar on right-hand side")
            }
            [_] => None,
            _ => Some("1(b): multiple definitions"),
        };
        if let Some(m) = message {
            out.push(Violation { var: mp.clone(), rule: "1(b)", message: m.into() });
        }
    }
    out
}
