//! Interval bounds on the supremum and infimum of a term over all
//! concretizations, computed by doubling/halving followed by bisection where
//! every step is one satisfiability check of `t ≥ r` or `t ≤ r`.
//!
//! Bounds are exact rationals; the returned width never exceeds `δ`.

mod bounds;

use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::logic::{judge_may, residual_tolerance, DecisionProcedure, LogicError, Status, Witness};
use crate::model::ConstrainedBN;
use crate::rational::{ratio, render, Rational};
use crate::terms::{evaluate, Constraint, EvalError, Term};

pub use bounds::{derived_bound, printed_bound};

/// How the bracket invariants are re-established at every loop head.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantChecks {
    Off,
    /// The retained witness is re-evaluated exactly against the attained side.
    Witness,
    /// Additionally re-query the solver for both sides (two extra checks per step).
    Solver,
}

#[derive(Clone, Copy, Debug)]
pub struct OptimizeOptions {
    pub invariant_checks: InvariantChecks,
    /// Doubling steps after which the supremum is declared unbounded.
    pub max_doublings: u32,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            invariant_checks: if cfg!(debug_assertions) { InvariantChecks::Witness } else { InvariantChecks::Off },
            max_doublings: 2048,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sup,
    Inf,
}

/// Accounting of one `sup` or `inf` run, in the orientation of that run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunStats {
    pub algorithm: Algorithm,
    /// Checks of `t > 0`, `t ≥ r` (sup) or `t ≤ r` (inf), including the initial probe.
    pub sat_checks: u64,
    /// Extra checks spent on solver-side invariant re-validation (not part of `sat_checks`).
    pub invariant_checks: u64,
    pub initial_cache: Rational,
    pub delta: Rational,
    pub low: Rational,
    pub high: Rational,
    /// `inf` returned `[0, cache/2]` from its early-exit branch.
    pub early_return: bool,
}

impl RunStats {
    /// The iteration bound as stated for the algorithm, evaluated generously at the
    /// returned bracket; `None` when it is unbounded (inf bracket touching 0).
    pub fn printed_bound(&self) -> Option<u64> {
        printed_bound(self)
    }

    /// A bound that counts every check, including each loop's final failing guard.
    pub fn derived_bound(&self) -> u64 {
        derived_bound(self)
    }

    /// Checks counted by the printed bound: all of them for sup, the `t ≤ r`
    /// checks for inf.
    pub fn counted_by_printed_bound(&self) -> u64 {
        match self.algorithm {
            Algorithm::Sup => self.sat_checks,
            Algorithm::Inf => self.sat_checks.saturating_sub(1),
        }
    }
}

/// Result of `sup` / `inf`: `[low, high]` with the witness attaining the
/// witnessed side (`≥ low` for sup, `≤ high` for inf).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub low: Rational,
    pub high: Rational,
    pub witness: Witness,
    /// Exact value of the term at the witness.
    pub value: Rational,
    pub stats: RunStats,
}

impl Bracket {
    pub fn width(&self) -> Rational {
        &self.high - &self.low
    }

    pub fn contains(&self, r: &Rational) -> bool {
        &self.low <= r && r <= &self.high
    }
}

/// Which sign probe succeeded in the starred dispatch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Positive,
    Zero,
    Negative,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Interval { low: Rational, high: Rational, witness: Witness },
    /// 0 is attained and is the extremum sought.
    ZeroExtremum { witness: Witness },
    Inconsistent,
}

impl Outcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::Interval { .. } => "interval",
            Outcome::ZeroExtremum { .. } => "zero_extremum",
            Outcome::Inconsistent => "inconsistent",
        }
    }

    pub fn interval(&self) -> Option<(&Rational, &Rational)> {
        match self {
            Outcome::Interval { low, high, .. } => Some((low, high)),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Outcome::Interval { witness, .. } | Outcome::ZeroExtremum { witness } => Some(witness),
            Outcome::Inconsistent => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stats {
    /// All satisfiability checks, dispatch probes included.
    pub sat_checks: u64,
    pub branch: Branch,
    /// The underlying `sup`/`inf` run, if one took place.
    pub run: Option<RunStats>,
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalResult {
    pub outcome: Outcome,
    pub stats: Stats,
}

impl IntervalResult {
    pub fn contains(&self, r: &Rational) -> bool {
        self.outcome.interval().is_some_and(|(l, h)| l <= r && r <= h)
    }
}

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("delta must be positive")]
    NonPositiveDelta,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("solver returned unknown{}: {reason}", bracket_text(.bracket))]
    Unknown { reason: String, bracket: Option<(Rational, Rational)> },
    #[error("witness contradicts probe '{probe}': exact value {value}")]
    Diverged { probe: String, value: String },
    #[error("bracket invariant violated: {0}")]
    Invariant(String),
    #[error("no upper bound found after {0} doublings")]
    Unbounded(u32),
    #[error("term cannot be evaluated at the witness: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

fn bracket_text(b: &Option<(Rational, Rational)>) -> String {
    match b {
        Some((l, h)) => format!(" (partial bracket [{}, {}])", render(l), render(h)),
        None => String::new(),
    }
}

impl OptimizeError {
    fn with_bracket(self, low: &Rational, high: &Rational) -> OptimizeError {
        match self {
            OptimizeError::Unknown { reason, bracket: None } => {
                OptimizeError::Unknown { reason, bracket: Some((low.clone(), high.clone())) }
            }
            e => e,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rel {
    Gt,
    Geq,
    Eq,
    Leq,
}

struct Runner<'a> {
    b: &'a ConstrainedBN,
    t: &'a Term,
    oracle: &'a mut dyn DecisionProcedure,
    opts: OptimizeOptions,
    checks: u64,
    invariant_checks: u64,
}

impl<'a> Runner<'a> {
    fn new(b: &'a ConstrainedBN, t: &'a Term, oracle: &'a mut dyn DecisionProcedure, opts: OptimizeOptions) -> Self {
        Runner { b, t, oracle, opts, checks: 0, invariant_checks: 0 }
    }

    fn formula(&self, rel: Rel, r: &Rational) -> Constraint {
        let (t, c) = (self.t.clone(), Term::constant(r.clone()));
        match rel {
            Rel::Gt => Constraint::Gt(t, c),
            Rel::Geq => Constraint::Geq(t, c),
            Rel::Eq => Constraint::Eq(t, c),
            Rel::Leq => Constraint::Leq(t, c),
        }
    }

    fn query(&mut self, rel: Rel, r: &Rational) -> Result<Option<(Witness, Rational)>, OptimizeError> {
        let phi = self.formula(rel, r);
        let verdict = judge_may(self.b, &phi, self.oracle)?;
        match verdict.status {
            Status::Unsat => Ok(None),
            Status::Unknown => {
                Err(OptimizeError::Unknown { reason: verdict.reason.unwrap_or_default(), bracket: None })
            }
            Status::Sat => {
                let w = verdict.witness.expect("sat verdict carries a witness");
                let value = evaluate(self.t, &w.values)?;
                let tol = residual_tolerance();
                let consistent = match rel {
                    Rel::Gt | Rel::Geq => value >= r - &tol,
                    Rel::Eq => (&value - r).abs() <= tol,
                    Rel::Leq => value <= r + &tol,
                };
                if !consistent {
                    return Err(OptimizeError::Diverged { probe: phi.to_string(), value: render(&value) });
                }
                Ok(Some((w, value)))
            }
        }
    }

    /// One counted satisfiability check.
    fn probe(&mut self, rel: Rel, r: &Rational) -> Result<Option<(Witness, Rational)>, OptimizeError> {
        self.checks += 1;
        self.query(rel, r)
    }

    /// Re-establishes "`t` attains the witnessed side and the other side is refuted".
    fn check_invariant(
        &mut self,
        attained: Rel,
        attained_at: &Rational,
        refuted_at: &Rational,
        witness_value: &Rational,
    ) -> Result<(), OptimizeError> {
        let tol = residual_tolerance();
        let ok = match attained {
            Rel::Geq => witness_value >= &(attained_at - &tol),
            _ => witness_value <= &(attained_at + &tol),
        };
        match self.opts.invariant_checks {
            InvariantChecks::Off => return Ok(()),
            _ if !ok => {
                return Err(OptimizeError::Invariant(format!(
                    "witness value {} does not attain {}",
                    render(witness_value),
                    render(attained_at)
                )))
            }
            InvariantChecks::Witness => return Ok(()),
            InvariantChecks::Solver => {}
        }
        self.invariant_checks += 2;
        if self.query(attained, attained_at)?.is_none() {
            return Err(OptimizeError::Invariant(format!("may(t ⋈ {}) became unsat", render(attained_at))));
        }
        if self.query(attained, refuted_at)?.is_some() {
            return Err(OptimizeError::Invariant(format!("may(t ⋈ {}) became sat", render(refuted_at))));
        }
        Ok(())
    }

    fn stats(&self, algorithm: Algorithm, c: &Rational, delta: &Rational, low: &Rational, high: &Rational) -> RunStats {
        RunStats {
            algorithm,
            sat_checks: self.checks,
            invariant_checks: self.invariant_checks,
            initial_cache: c.clone(),
            delta: delta.clone(),
            low: low.clone(),
            high: high.clone(),
            early_return: false,
        }
    }

    fn initial(&mut self, seed: Option<(Witness, Rational)>) -> Result<(Witness, Rational), OptimizeError> {
        let seed = match seed {
            Some(s) => {
                self.checks += 1;
                Some(s)
            }
            None => self.probe(Rel::Gt, &Rational::zero())?,
        };
        let (w, value) = seed.ok_or_else(|| OptimizeError::Precondition(format!("'{} > 0' is unsatisfiable", self.t)))?;
        if !value.is_positive() {
            return Err(OptimizeError::Precondition(format!(
                "witness of '{} > 0' evaluates to {}",
                self.t,
                render(&value)
            )));
        }
        Ok((w, value))
    }

    fn sup(&mut self, delta: &Rational, seed: Option<(Witness, Rational)>) -> Result<Bracket, OptimizeError> {
        let (mut witness, mut cache) = self.initial(seed)?;
        let c = cache.clone();
        let two = Rational::from_integer(2.into());
        let mut doublings = 0;
        while let Some((w, v)) = self.probe(Rel::Geq, &(&two * &cache)).map_err(|e| e.with_bracket(&cache, &cache))? {
            doublings += 1;
            if doublings > self.opts.max_doublings {
                return Err(OptimizeError::Unbounded(self.opts.max_doublings));
            }
            witness = w;
            cache = v;
        }
        let mut low = cache.clone();
        let mut high = &two * &cache;
        let mut value = cache;
        self.check_invariant(Rel::Geq, &low, &high, &value)?;
        while &high - &low > *delta {
            let mid = &low + (&high - &low) / &two;
            match self.probe(Rel::Geq, &mid).map_err(|e| e.with_bracket(&low, &high))? {
                Some((w, v)) => {
                    low = mid;
                    witness = w;
                    value = v;
                }
                None => high = mid,
            }
            self.check_invariant(Rel::Geq, &low, &high, &value)?;
        }
        let stats = self.stats(Algorithm::Sup, &c, delta, &low, &high);
        Ok(Bracket { low, high, witness, value, stats })
    }

    fn inf(&mut self, delta: &Rational, seed: Option<(Witness, Rational)>) -> Result<Bracket, OptimizeError> {
        let (mut witness, mut cache) = self.initial(seed)?;
        let c = cache.clone();
        let half = ratio(1, 2);
        let zero = Rational::zero();
        // Last answer to `t ≤ cache/2`, reused by the test after the loop.
        let mut below: Option<(Witness, Rational)>;
        loop {
            let target = &half * &cache;
            if target <= *delta {
                below = self.probe(Rel::Leq, &target).map_err(|e| e.with_bracket(&zero, &cache))?;
                break;
            }
            below = self.probe(Rel::Leq, &target).map_err(|e| e.with_bracket(&zero, &cache))?;
            match below.take() {
                Some((w, v)) => {
                    witness = w;
                    cache = v;
                }
                None => break,
            }
        }
        if let Some((w, v)) = below {
            let high = &half * &cache;
            let mut stats = self.stats(Algorithm::Inf, &c, delta, &zero, &high);
            stats.early_return = true;
            return Ok(Bracket { low: zero, high, witness: w, value: v, stats });
        }
        let mut low = &half * &cache;
        let mut high = cache.clone();
        let mut value = cache;
        self.check_invariant(Rel::Leq, &high, &low, &value)?;
        while &high - &low > *delta {
            let mid = &low + (&high - &low) * &half;
            match self.probe(Rel::Leq, &mid).map_err(|e| e.with_bracket(&low, &high))? {
                Some((w, v)) => {
                    high = mid;
                    witness = w;
                    value = v;
                }
                None => low = mid,
            }
            self.check_invariant(Rel::Leq, &high, &low, &value)?;
        }
        let stats = self.stats(Algorithm::Inf, &c, delta, &low, &high);
        Ok(Bracket { low, high, witness, value, stats })
    }
}

fn check_delta(delta: &Rational) -> Result<(), OptimizeError> {
    if delta.is_positive() {
        Ok(())
    } else {
        Err(OptimizeError::NonPositiveDelta)
    }
}

/// Brackets `sup T(t)` to width `δ`. Requires a consistent model with
/// `0 < sup T(t) < ∞`; use [`sup_star`] otherwise.
pub fn sup(
    b: &ConstrainedBN,
    t: &Term,
    delta: &Rational,
    oracle: &mut dyn DecisionProcedure,
    opts: OptimizeOptions,
) -> Result<Bracket, OptimizeError> {
    check_delta(delta)?;
    Runner::new(b, t, oracle, opts).sup(delta, None)
}

/// Brackets `inf T(t)` to width `δ`. Requires `T(t) ⊆ ℝ₀⁺` to contain a positive
/// value; use [`inf_star`] otherwise.
pub fn inf(
    b: &ConstrainedBN,
    t: &Term,
    delta: &Rational,
    oracle: &mut dyn DecisionProcedure,
    opts: OptimizeOptions,
) -> Result<Bracket, OptimizeError> {
    check_delta(delta)?;
    Runner::new(b, t, oracle, opts).inf(delta, None)
}

/// Brackets `sup T(t)` for any `t` with a finite supremum, dispatching on the
/// satisfiability of `t > 0`, `t = 0` and `t < 0`.
pub fn sup_star(
    b: &ConstrainedBN,
    t: &Term,
    delta: &Rational,
    oracle: &mut dyn DecisionProcedure,
    opts: OptimizeOptions,
) -> Result<IntervalResult, OptimizeError> {
    check_delta(delta)?;
    let start = Instant::now();
    let mut dispatch = 0;
    let probe = |rel: Rel, term: &Term, oracle: &mut dyn DecisionProcedure| {
        Runner::new(b, term, oracle, opts).query(rel, &Rational::zero())
    };

    dispatch += 1;
    if let Some(seed) = probe(Rel::Gt, t, oracle)? {
        let mut runner = Runner::new(b, t, oracle, opts);
        let br = runner.sup(delta, Some(seed))?;
        let stats = Stats {
            sat_checks: br.stats.sat_checks,
            branch: Branch::Positive,
            run: Some(br.stats),
            wall_time: start.elapsed(),
        };
        return Ok(IntervalResult { outcome: Outcome::Interval { low: br.low, high: br.high, witness: br.witness }, stats });
    }
    dispatch += 1;
    if let Some((witness, _)) = probe(Rel::Eq, t, oracle)? {
        let stats = Stats { sat_checks: dispatch, branch: Branch::Zero, run: None, wall_time: start.elapsed() };
        return Ok(IntervalResult { outcome: Outcome::ZeroExtremum { witness }, stats });
    }
    dispatch += 1;
    let neg = -t.clone();
    if let Some(seed) = probe(Rel::Gt, &neg, oracle)? {
        let mut runner = Runner::new(b, &neg, oracle, opts);
        let br = runner.inf(delta, Some(seed))?;
        let stats = Stats {
            // the `t < 0` probe doubles as the run's initial `-t > 0` check
            sat_checks: dispatch - 1 + br.stats.sat_checks,
            branch: Branch::Negative,
            run: Some(br.stats),
            wall_time: start.elapsed(),
        };
        let outcome = Outcome::Interval { low: -br.high, high: -br.low, witness: br.witness };
        return Ok(IntervalResult { outcome, stats });
    }
    let stats = Stats { sat_checks: dispatch, branch: Branch::None, run: None, wall_time: start.elapsed() };
    Ok(IntervalResult { outcome: Outcome::Inconsistent, stats })
}

/// Brackets `inf T(t)` for any `t` with a finite infimum, as the mirror of
/// [`sup_star`] on `-t`.
pub fn inf_star(
    b: &ConstrainedBN,
    t: &Term,
    delta: &Rational,
    oracle: &mut dyn DecisionProcedure,
    opts: OptimizeOptions,
) -> Result<IntervalResult, OptimizeError> {
    let neg = -t.clone();
    let r = sup_star(b, &neg, delta, oracle, opts)?;
    let outcome = match r.outcome {
        Outcome::Interval { low, high, witness } => Outcome::Interval { low: -high, high: -low, witness },
        other => other,
    };
    Ok(IntervalResult { outcome, stats: r.stats })
}

/// Midpoint of an interval outcome.
pub fn midpoint(low: &Rational, high: &Rational) -> Rational {
    (low + high) / Rational::from_integer(2.into())
}
