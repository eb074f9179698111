use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::expr::{Constraint, Name, Term};
use crate::rational::Rational;

/// Map from variable name to exact value.
pub type Assignment = BTreeMap<Name, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable '{0}'")]
    Unbound(Name),
    #[error("division by zero")]
    DivisionByZero,
}

pub fn evaluate(t: &Term, a: &Assignment) -> Result<Rational, EvalError> {
    Ok(match t {
        Term::Const(c) => c.clone(),
        Term::Var(v) => a.get(v).cloned().ok_or_else(|| EvalError::Unbound(v.clone()))?,
        Term::Add(x, y) => evaluate(x, a)? + evaluate(y, a)?,
        Term::Mul(x, y) => evaluate(x, a)? * evaluate(y, a)?,
        Term::Neg(x) => -evaluate(x, a)?,
        Term::Sub(x, y) => evaluate(x, a)? - evaluate(y, a)?,
        Term::Div(x, y) => {
            let d = evaluate(y, a)?;
            if d.is_zero() {
                return Err(EvalError::DivisionByZero);
            }
            evaluate(x, a)? / d
        }
    })
}

pub fn holds(c: &Constraint, a: &Assignment) -> Result<bool, EvalError> {
    use Constraint as C;
    let diff = |x: &Term, y: &Term| -> Result<Rational, EvalError> { Ok(evaluate(x, a)? - evaluate(y, a)?) };
    Ok(match c {
        C::True => true,
        C::Leq(x, y) => !diff(x, y)?.is_positive(),
        C::Lt(x, y) => diff(x, y)?.is_negative(),
        C::Eq(x, y) => diff(x, y)?.is_zero(),
        C::Geq(x, y) => !diff(x, y)?.is_negative(),
        C::Gt(x, y) => diff(x, y)?.is_positive(),
        C::Not(x) => !holds(x, a)?,
        C::And(x, y) => holds(x, a)? && holds(y, a)?,
        C::Or(x, y) => holds(x, a)? || holds(y, a)?,
    })
}

/// Magnitude by which an assignment violates a constraint; `None` stands for an
/// unbounded violation (e.g. `false`). Strict and non-strict comparisons are
/// measured alike, so a boundary point of a strict inequality scores zero.
pub fn violation(c: &Constraint, a: &Assignment) -> Result<Option<Rational>, EvalError> {
    violation_signed(c, a, false)
}

fn max_v(x: Option<Rational>, y: Option<Rational>) -> Option<Rational> {
    match (x, y) {
        (Some(x), Some(y)) => Some(if x >= y { x } else { y }),
        _ => None,
    }
}

fn min_v(x: Option<Rational>, y: Option<Rational>) -> Option<Rational> {
    match (x, y) {
        (Some(x), Some(y)) => Some(if x <= y { x } else { y }),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn pos(r: Rational) -> Rational {
    if r.is_positive() {
        r
    } else {
        Rational::zero()
    }
}

fn violation_signed(c: &Constraint, a: &Assignment, negated: bool) -> Result<Option<Rational>, EvalError> {
    use Constraint as C;
    let diff = |x: &Term, y: &Term| -> Result<Rational, EvalError> { Ok(evaluate(x, a)? - evaluate(y, a)?) };
    Ok(match c {
        C::True => {
            if negated {
                None
            } else {
                Some(Rational::zero())
            }
        }
        // x <= y, x < y: violated by x - y > 0; negation violated by y - x > 0
        C::Leq(x, y) | C::Lt(x, y) => {
            let d = diff(x, y)?;
            Some(pos(if negated { -d } else { d }))
        }
        C::Geq(x, y) | C::Gt(x, y) => {
            let d = diff(y, x)?;
            Some(pos(if negated { -d } else { d }))
        }
        C::Eq(x, y) => {
            let d = diff(x, y)?;
            Some(if negated { Rational::zero() } else { d.abs() })
        }
        C::Not(x) => violation_signed(x, a, !negated)?,
        C::And(x, y) => {
            let (vx, vy) = (violation_signed(x, a, negated)?, violation_signed(y, a, negated)?);
            if negated {
                min_v(vx, vy)
            } else {
                max_v(vx, vy)
            }
        }
        C::Or(x, y) => {
            let (vx, vy) = (violation_signed(x, a, negated)?, violation_signed(y, a, negated)?);
            if negated {
                max_v(vx, vy)
            } else {
                min_v(vx, vy)
            }
        }
    })
}
