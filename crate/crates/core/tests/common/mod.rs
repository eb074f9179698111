//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::PathBuf;

use cbn::inference::{enumerate_joint, query_joint, symbolic_marginal, InferenceOptions, DEFAULT_JOINT_CAP};
use cbn::logic::{check_consistent, judge_may, judge_must, SmtSolver, SolverConfig, Status, Truth};
use cbn::model::{concretize, ConstrainedBN};
use cbn::random::{generate, GenConfig};
use cbn::rational::ratio;
use cbn::terms::{Assignment, Constraint, Term};
use cbn::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

pub fn solver() -> Option<SmtSolver> {
    let cfg = SolverConfig::from_env()?;
    SmtSolver::start(SolverConfig { timeout_ms: 60_000, ..cfg }).ok()
}

/// Generated networks of at most 6 nodes, 3 states and 2 variables, each compared
/// at `points` interior assignments against brute-force joint enumeration.
/// Returns the number of exact comparisons made.
pub fn oracle_equivalence(models: u64, points: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0;
    for _ in 0..models {
        let model_seed: u64 = rng.gen();
        let cfg = GenConfig::new(rng.gen_range(1..=6), rng.gen_range(0..=2)).with_max_states(3);
        let g = generate(model_seed, &cfg).map_err(|e| e.to_string())?;
        let q = symbolic_marginal(&g.model, &g.query, &InferenceOptions::default())
            .map_err(|e| format!("model {model_seed}: {e}"))?
            .quotient();
        for _ in 0..points {
            // strictly inside (0, 1) so no symbolic entry `x` or `1-x` vanishes
            let a: Assignment = g.model.x_vars().iter().map(|v| (v.clone(), ratio(rng.gen_range(1..=996), 997))).collect();
            let c = concretize(&g.model, &a).map_err(|e| format!("model {model_seed}: {e}"))?;
            let joint = enumerate_joint(&c, DEFAULT_JOINT_CAP).map_err(|e| e.to_string())?;
            let oracle = query_joint(&joint, &g.query).map_err(|e| e.to_string())?;
            let symbolic = q.evaluate(&a).map_err(|e| e.to_string())?;
            if symbolic != oracle {
                return Err(format!("model {model_seed} at {a:?}: symbolic {symbolic} vs joint {oracle}"));
            }
            compared += 1;
        }
    }
    Ok(compared)
}

/// A generated network with its suggested query installed as `mp_q`.
pub fn judgment_model(seed: u64) -> ConstrainedBN {
    let nodes = 2 + (seed % 3) as usize;
    let vars = 1 + (seed % 2) as usize;
    let g = generate(seed, &GenConfig::new(nodes, vars).with_max_states(3)).unwrap();
    g.model.install_marginal(&g.query, "mp_q").unwrap()
}

fn atom(rng: &mut ChaCha8Rng, b: &ConstrainedBN) -> Constraint {
    let vars: Vec<Term> = b.variables().iter().map(|v| Term::Var(v.clone())).collect();
    let pick = |rng: &mut ChaCha8Rng| vars[rng.gen_range(0..vars.len())].clone();
    let lhs = match rng.gen_range(0..3) {
        0 => pick(rng),
        1 => pick(rng) + pick(rng),
        _ => pick(rng) * pick(rng),
    };
    let c = Term::constant(ratio(rng.gen_range(0..=20), 20));
    match rng.gen_range(0..4) {
        0 => Constraint::Leq(lhs, c),
        1 => Constraint::Lt(lhs, c),
        2 => Constraint::Geq(lhs, c),
        _ => Constraint::Gt(lhs, c),
    }
}

/// Random quantifier-free formula over the model's variables.
pub fn formula(rng: &mut ChaCha8Rng, b: &ConstrainedBN, depth: u32) -> Constraint {
    if depth == 0 || rng.gen_bool(0.4) {
        return atom(rng, b);
    }
    match rng.gen_range(0..3) {
        0 => formula(rng, b, depth - 1).and(formula(rng, b, depth - 1)),
        1 => formula(rng, b, depth - 1).or(formula(rng, b, depth - 1)),
        _ => formula(rng, b, depth - 1).negate(),
    }
}

/// `Some(true)` for sat, `Some(false)` for unsat, `None` when undecided.
pub fn may(b: &ConstrainedBN, phi: &Constraint, z3: &mut SmtSolver) -> Result<Option<bool>, String> {
    Ok(match judge_may(b, phi, z3).map_err(|e| e.to_string())?.status {
        Status::Sat => Some(true),
        Status::Unsat => Some(false),
        Status::Unknown => None,
    })
}

pub fn must(b: &ConstrainedBN, phi: &Constraint, z3: &mut SmtSolver) -> Result<Option<bool>, String> {
    Ok(match judge_must(b, phi, z3).map_err(|e| e.to_string())?.truth {
        Truth::Holds => Some(true),
        Truth::Fails => Some(false),
        Truth::Unknown => None,
    })
}

#[derive(Debug, Default)]
pub struct LawSummary {
    pub decided: u32,
    pub undecided: u32,
    pub must_valid: u32,
    pub unsatisfiable: u32,
}

/// Duality, distribution over connectives and the consistency characterizations
/// on `pairs` random (consistent model, formula) pairs.
pub fn judgment_laws(z3: &mut SmtSolver, pairs: u64, seed: u64) -> Result<LawSummary, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = LawSummary::default();
    for i in 0..pairs {
        let b = judgment_model(i);
        if !check_consistent(&b, z3).map_err(|e| e.to_string())?.is_sat() {
            return Err(format!("model {i} should be consistent by construction"));
        }
        let (p1, p2) = (formula(&mut rng, &b, 2), formula(&mut rng, &b, 2));
        let not = |c: &Constraint| c.clone().negate();
        let verdicts = [
            must(&b, &p1, z3)?,
            may(&b, &not(&p1), z3)?,
            may(&b, &p1, z3)?,
            must(&b, &not(&p1), z3)?,
            must(&b, &p2, z3)?,
            may(&b, &p2, z3)?,
            must(&b, &p1.clone().and(p2.clone()), z3)?,
            may(&b, &p1.clone().or(p2.clone()), z3)?,
            may(&b, &Constraint::True, z3)?,
            may(&b, &p1.clone().or(not(&p1)), z3)?,
            must(&b, &p1.clone().and(not(&p1)), z3)?,
        ];
        let Some(v) = verdicts.iter().copied().collect::<Option<Vec<bool>>>() else {
            s.undecided += 1;
            continue;
        };
        let [must1, may_not1, may1, must_not1, must2, may2, must_and, may_or, may_true, excluded_middle, contradiction] =
            v[..]
        else {
            unreachable!()
        };
        let laws = [
            ("must p iff not may not-p", must1 == !may_not1),
            ("may p iff not must not-p", may1 == !must_not1),
            ("must distributes over and", must_and == (must1 && must2)),
            ("may distributes over or", may_or == (may1 || may2)),
            ("may true", may_true),
            ("must implies may", (!must1 || may1) && (!must2 || may2)),
            ("may p or not-p", excluded_middle),
            ("not must p and not-p", !contradiction),
        ];
        if let Some((law, _)) = laws.iter().find(|(_, ok)| !ok) {
            return Err(format!("model {i}: '{law}' violated for p1 = {p1}, p2 = {p2}"));
        }
        s.must_valid += must1 as u32;
        s.unsatisfiable += !may1 as u32;
        s.decided += 1;
    }
    Ok(s)
}

/// On `count` deliberately inconsistent models every must-judgment holds and is
/// flagged vacuous, and every may-judgment fails.
pub fn vacuity(z3: &mut SmtSolver, count: u64, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let b = judgment_model(1000 + i);
        // every x is in [0, 1], so requiring the first one to exceed 1 is contradictory
        let x = b.x_vars().iter().next().unwrap().clone();
        let b = b.with_constraints([Constraint::Gt(Term::Var(x), Term::int(1))]);
        let phi = formula(&mut rng, &b, 2);
        if !check_consistent(&b, z3).map_err(|e| e.to_string())?.is_unsat() {
            return Err(format!("model {i} should be inconsistent"));
        }
        for f in [phi.clone(), phi.clone().and(phi.clone().negate())] {
            let v = judge_must(&b, &f, z3).map_err(|e| e.to_string())?;
            if v.truth != Truth::Holds || !v.vacuous {
                return Err(format!("model {i}: must({f}) = {:?}, vacuous = {}", v.truth, v.vacuous));
            }
        }
        for f in [Constraint::True, phi.clone(), phi.clone().or(phi.negate())] {
            if may(&b, &f, z3)? != Some(false) {
                return Err(format!("model {i}: may({f}) should fail"));
            }
        }
    }
    Ok(())
}

/// Extremum of `f` over the open interval `(lo, hi)`: a uniform grid of `n`
/// interior points, then repeated local grids around the best point. Points
/// where `f` is undefined are skipped.
pub fn grid_extremum(
    f: &dyn Fn(&Rational) -> Option<Rational>,
    lo: &Rational,
    hi: &Rational,
    n: u32,
    maximize: bool,
) -> (Rational, Rational) {
    let better = |a: &Rational, b: &Rational| if maximize { a > b } else { a < b };
    let mut best: Option<(Rational, Rational)> = None;
    let scan = |from: &Rational, to: &Rational, best: &mut Option<(Rational, Rational)>| {
        for k in 0..=n {
            let x = from + (to - from) * ratio(k as i64, n as i64);
            if &x <= lo || &x >= hi {
                continue;
            }
            if let Some(v) = f(&x) {
                if best.as_ref().map_or(true, |(_, bv)| better(&v, bv)) {
                    *best = Some((x, v));
                }
            }
        }
    };
    scan(lo, hi, &mut best);
    let mut h = (hi - lo) / ratio(n as i64, 1);
    for _ in 0..5 {
        let x = best.as_ref().expect("f defined somewhere on the grid").0.clone();
        let (from, to) = (&x - &h, &x + &h);
        let from = if &from < lo { lo.clone() } else { from };
        let to = if &to > hi { hi.clone() } else { to };
        scan(&from, &to, &mut best);
        h = &h / ratio(n as i64 / 2, 1);
    }
    best.unwrap()
}
