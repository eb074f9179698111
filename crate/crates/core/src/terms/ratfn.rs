use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use super::eval::{Assignment, EvalError};
use super::expr::Term;
use super::poly::Polynomial;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rational function with zero denominator")]
pub struct ZeroDenominator;

/// Quotient of two canonical polynomials. A constant denominator is always folded
/// into the numerator, so division-free terms have denominator `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFn {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, ZeroDenominator> {
        match den.as_constant() {
            Some(c) if c.is_zero() => Err(ZeroDenominator),
            Some(c) => Ok(RationalFn { num: num.scale(&c.recip()), den: Polynomial::one() }),
            None if num.is_zero() => Ok(RationalFn { num, den: Polynomial::one() }),
            None => Ok(RationalFn { num, den }),
        }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFn { num: p, den: Polynomial::one() }
    }

    pub fn constant(c: Rational) -> Self {
        RationalFn::from_poly(Polynomial::constant(c))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn into_parts(self) -> (Polynomial, Polynomial) {
        (self.num, self.den)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn try_from_term(t: &Term) -> Result<RationalFn, ZeroDenominator> {
        Ok(match t {
            Term::Const(c) => RationalFn::constant(c.clone()),
            Term::Var(v) => RationalFn::from_poly(Polynomial::var(v.clone())),
            Term::Add(a, b) => RationalFn::try_from_term(a)?.add(&RationalFn::try_from_term(b)?),
            Term::Sub(a, b) => RationalFn::try_from_term(a)?.sub(&RationalFn::try_from_term(b)?),
            Term::Mul(a, b) => RationalFn::try_from_term(a)?.mul(&RationalFn::try_from_term(b)?),
            Term::Neg(a) => RationalFn::try_from_term(a)?.neg(),
            Term::Div(a, b) => RationalFn::try_from_term(a)?.div(&RationalFn::try_from_term(b)?)?,
        })
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        if self.den == other.den {
            return RationalFn::new(&self.num + &other.num, self.den.clone()).expect("nonzero denominator");
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        RationalFn::new(num, &self.den * &other.den).expect("product of nonzero denominators")
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        RationalFn::new(&self.num * &other.num, &self.den * &other.den).expect("product of nonzero denominators")
    }

    pub fn div(&self, other: &RationalFn) -> Result<RationalFn, ZeroDenominator> {
        if other.num.is_zero() {
            return Err(ZeroDenominator);
        }
        RationalFn::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn pow(&self, e: u32) -> RationalFn {
        RationalFn::new(self.num.pow(e), self.den.pow(e)).expect("nonzero denominator")
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<Rational, EvalError> {
        let d = self.den.evaluate(a)?;
        if d.is_zero() {
            return Err(EvalError::DivisionByZero);
        }
        Ok(self.num.evaluate(a)? / d)
    }

    pub fn to_term(&self) -> Term {
        if self.den.is_one() {
            self.num.to_term()
        } else {
            Term::Div(Box::new(self.num.to_term()), Box::new(self.den.to_term()))
        }
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// Canonical rational-function normal form of a term. Fails only when a divisor
/// normalizes to the zero polynomial, i.e. the term is defined nowhere.
pub fn to_rational_fn(t: &Term) -> Result<RationalFn, ZeroDenominator> {
    RationalFn::try_from_term(t)
}

/// Round-trips a term through its normal form. Terms with a syntactically zero
/// divisor are returned unchanged.
pub fn simplify(t: &Term) -> Term {
    match to_rational_fn(t) {
        Ok(r) => r.to_term(),
        Err(_) => t.clone(),
    }
}
