//! Satisfiability-check budgets for `sup` and `inf`.
//!
//! The printed bounds count loop iterations; a run also pays for the initial
//! sign probe and for the final failing guard of each loop, which the derived
//! bounds include. Both are evaluated at the returned bracket, on the generous
//! side of the unknown extremum (`high` for a supremum, `low` for an infimum).

use crate::rational::{log2, Rational};

use super::{Algorithm, RunStats};

/// Slack for f64 logarithms of exact powers of two.
const EPS: f64 = 1e-9;

fn clamp(x: f64) -> u64 {
    if x.is_finite() && x > 0.0 {
        x as u64
    } else {
        0
    }
}

/// `⌊2·log₂(s) − log₂(c) − log₂(δ) + 1⌋` for sup (all checks counted) and
/// `⌊2·log₂(c) − log₂(min(δ, i))⌋` for inf (the `t ≤ r` checks counted).
pub fn printed_bound(s: &RunStats) -> Option<u64> {
    let (c, d) = (log2(&s.initial_cache), log2(&s.delta));
    match s.algorithm {
        Algorithm::Sup => Some(clamp((2.0 * log2(&s.high) - c - d + 1.0 + EPS).floor())),
        Algorithm::Inf => {
            if s.low <= Rational::from_integer(0.into()) {
                return None;
            }
            let m = if s.delta < s.low { d } else { log2(&s.low) };
            Some(clamp((2.0 * c - m + EPS).floor()))
        }
    }
}

/// Every check of the run: the initial probe, each doubling (halving) step with
/// its failing guard, and each bisection step.
pub fn derived_bound(s: &RunStats) -> u64 {
    let (c, d) = (log2(&s.initial_cache), log2(&s.delta));
    match s.algorithm {
        Algorithm::Sup => {
            let h = log2(&s.high);
            let doublings = clamp((h - c + EPS).floor());
            let bisections = clamp((h - d).ceil());
            2 + doublings + bisections
        }
        Algorithm::Inf => {
            let floor_at = if s.delta > s.low { d } else { log2(&s.low) };
            let halvings = clamp((c - floor_at + EPS).floor());
            let bisections = clamp((c - 1.0 - d).ceil());
            2 + halvings + bisections
        }
    }
}
