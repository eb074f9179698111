//! Symbolic sensitivity value of a hypothesis event `H = h` with respect to the
//! likelihood of an evidence event `E = e`:
//!
//! `s = PO·(1−POx)·Px / (PO·PxO + (1−POx)·Px)²`
//!
//! with `PO = p(H=h)`, `Px = p(E=e)`, `POx = p(H=h | E=e)` and `PxO = p(E=e | H=h)`,
//! each obtained by symbolic inference. The result is an explicit rational
//! function of the probability variables and a division-free definition
//! `s·D = N`, `D > 0` of an auxiliary variable.

use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inference::{symbolic_marginal, InferenceError};
use crate::logic::{judge_must, DecisionProcedure, LogicError, Truth};
use crate::model::{ConstrainedBN, MarginalSpec, ModelError};
use crate::rational::{to_f64, Rational};
use crate::terms::{Assignment, Constraint, Name, Polynomial, RationalFn, Term};

/// How the complement of the hypothesis state enters the formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    /// All other hypothesis states merged into one: `p(E=e, H≠h) = (1−POx)·Px`.
    #[default]
    Coarsened,
    /// `p(E=e, H≠h)` summed over the remaining hypothesis states one by one.
    Raw,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitivitySpec {
    pub hypothesis_node: Name,
    pub hypothesis_state: Name,
    pub evidence_node: Name,
    pub evidence_state: Name,
    #[serde(default)]
    pub reading: Reading,
}

impl SensitivitySpec {
    pub fn new(hypothesis: (&str, &str), evidence: (&str, &str)) -> Self {
        SensitivitySpec {
            hypothesis_node: hypothesis.0.into(),
            hypothesis_state: hypothesis.1.into(),
            evidence_node: evidence.0.into(),
            evidence_state: evidence.1.into(),
            reading: Reading::Coarsened,
        }
    }

    pub fn with_reading(mut self, reading: Reading) -> Self {
        self.reading = reading;
        self
    }

    fn po(&self) -> MarginalSpec {
        MarginalSpec::new(&self.hypothesis_node, &self.hypothesis_state)
    }

    fn px(&self) -> MarginalSpec {
        MarginalSpec::new(&self.evidence_node, &self.evidence_state)
    }

    fn pox(&self) -> MarginalSpec {
        self.po().given(&self.evidence_node, &self.evidence_state)
    }

    fn pxo(&self) -> MarginalSpec {
        self.px().given(&self.hypothesis_node, &self.hypothesis_state)
    }
}

#[derive(Debug, Error)]
pub enum SensitivityError {
    #[error("hypothesis and evidence must be different nodes")]
    SameNode,
    #[error("sensitivity undefined on feasible set")]
    Undefined,
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// The four component marginals as rational functions of the probability variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub po: RationalFn,
    pub px: RationalFn,
    pub pox: RationalFn,
    pub pxo: RationalFn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SensitivityValue {
    pub spec: SensitivitySpec,
    pub components: Components,
    /// `s` as an explicit rational function `numerator / denominator`.
    pub closed_form: RationalFn,
    /// `numerator` of `PO·(1−POx)·Px` after bringing it over one denominator.
    pub numerator_factor: Polynomial,
    /// Numerator of `PO·PxO + (1−POx)·Px`; its square divides `denominator`.
    pub square_base: Polynomial,
}

impl SensitivityValue {
    pub fn numerator(&self) -> &Polynomial {
        self.closed_form.num()
    }

    pub fn denominator(&self) -> &Polynomial {
        self.closed_form.den()
    }

    /// `s·D = N` and, unless `D` is constant, `D > 0`.
    pub fn constraints(&self, s: &str) -> Vec<Constraint> {
        let (n, d) = (self.numerator().to_term(), self.denominator().to_term());
        if self.denominator().is_one() {
            return vec![Constraint::Eq(Term::var(s), n)];
        }
        vec![Constraint::Eq(Term::var(s) * d.clone(), n), Constraint::Gt(d, Term::int(0))]
    }

    /// `b` extended with auxiliary variable `s` defined by [`Self::constraints`].
    pub fn install(&self, b: &ConstrainedBN, s: &str) -> Result<ConstrainedBN, ModelError> {
        b.declare_marginal_var(s, self.constraints(s))
    }

    pub fn evaluate(&self, a: &Assignment) -> Option<Rational> {
        self.closed_form.evaluate(a).ok()
    }

    /// `var,s` samples of the closed form on `steps + 1` equidistant points of
    /// `[from, to]`, other variables fixed by `fixed`. Points where the
    /// closed form is undefined are skipped.
    pub fn sample_csv(&self, var: &str, from: &Rational, to: &Rational, steps: u32, fixed: &Assignment) -> String {
        let mut out = format!("{var},s\n");
        let steps = steps.max(1);
        for i in 0..=steps {
            let v = from + (to - from) * Rational::new(i.into(), steps.into());
            let mut a = fixed.clone();
            a.insert(var.into(), v.clone());
            if let Some(s) = self.evaluate(&a) {
                let _ = writeln!(out, "{},{}", to_f64(&v), to_f64(&s));
            }
        }
        out
    }
}

fn quotient(b: &ConstrainedBN, spec: &MarginalSpec) -> Result<RationalFn, InferenceError> {
    Ok(symbolic_marginal(b, spec, b.options())?.quotient())
}

fn components(b: &ConstrainedBN, spec: &SensitivitySpec) -> Result<Components, InferenceError> {
    Ok(Components {
        po: quotient(b, &spec.po())?,
        px: quotient(b, &spec.px())?,
        pox: quotient(b, &spec.pox())?,
        pxo: quotient(b, &spec.pxo())?,
    })
}

/// `p(E=e, H≠h)` as the sum over the other hypothesis states of `p(E=e | H=s)·p(H=s)`.
fn raw_complement(b: &ConstrainedBN, spec: &SensitivitySpec) -> Result<RationalFn, SensitivityError> {
    let node = b
        .node(&spec.hypothesis_node)
        .ok_or_else(|| InferenceError::UnknownNode(spec.hypothesis_node.clone()))?;
    let mut sum = RationalFn::constant(Rational::zero());
    for state in node.states.iter().filter(|s| **s != spec.hypothesis_state) {
        let prior = quotient(b, &MarginalSpec::new(&spec.hypothesis_node, state))?;
        if prior.num().is_zero() {
            continue;
        }
        let likelihood = quotient(b, &spec.px().given(&spec.hypothesis_node, state))?;
        sum = sum.add(&likelihood.mul(&prior));
    }
    Ok(sum)
}

/// Derives the sensitivity value symbolically.
pub fn sensitivity_value(b: &ConstrainedBN, spec: &SensitivitySpec) -> Result<SensitivityValue, SensitivityError> {
    if spec.hypothesis_node == spec.evidence_node {
        return Err(SensitivityError::SameNode);
    }
    let c = components(b, spec)?;
    let one = RationalFn::constant(Rational::from_integer(1.into()));
    let complement = one.sub(&c.pox).mul(&c.px);
    let top = c.po.mul(&complement);
    let joint_other = match spec.reading {
        Reading::Coarsened => complement,
        Reading::Raw => raw_complement(b, spec)?,
    };
    let base = c.po.mul(&c.pxo).add(&joint_other);
    if base.num().is_zero() {
        return Err(SensitivityError::Undefined);
    }
    let (a_n, a_d) = top.into_parts();
    let (b_n, b_d) = base.into_parts();
    let num = &a_n * &(&b_d * &b_d);
    let den = &a_d * &(&b_n * &b_n);
    let closed_form = RationalFn::new(num, den).map_err(|_| SensitivityError::Undefined)?;
    Ok(SensitivityValue { spec: spec.clone(), components: c, closed_form, numerator_factor: a_n, square_base: b_n })
}

/// Fails with [`SensitivityError::Undefined`] when the denominator provably
/// vanishes on every concretization.
pub fn check_defined(
    b: &ConstrainedBN,
    s: &SensitivityValue,
    oracle: &mut dyn DecisionProcedure,
) -> Result<(), SensitivityError> {
    if s.denominator().as_constant().is_some() {
        return Ok(());
    }
    let zero = Constraint::Eq(s.denominator().to_term(), Term::int(0));
    let verdict = judge_must(b, &zero, oracle)?;
    if verdict.truth == Truth::Holds && !verdict.vacuous {
        return Err(SensitivityError::Undefined);
    }
    Ok(())
}

/// Text of the closed form, `s = N / D`.
pub fn describe(s: &SensitivityValue) -> String {
    if s.denominator().is_one() {
        return format!("s = {}", s.numerator());
    }
    format!("s = ({}) / ({})", s.numerator(), s.denominator())
}
