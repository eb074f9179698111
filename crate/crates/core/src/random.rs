//! Seeded random constrained networks and the inference timing harness.
//!
//! Each node draws its parents uniformly from the nodes before it (at most
//! `max_parents`), and its state count uniformly from `1..=max_states`. A table
//! row is either constants or `x` / `1-x` for one probability variable `x`
//! with zeros elsewhere, so every row sums to 1 identically. The first state
//! never has a constant-zero entry, so hard evidence on it is always possible.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::inference::{symbolic_marginal, InferenceError, InferenceOptions};
use crate::model::{ConstrainedBN, MarginalSpec, NodeSpec};
use crate::rational::Rational;
use crate::terms::{Constraint, Name, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub nodes: usize,
    pub vars: usize,
    pub max_states: usize,
    pub max_parents: usize,
    /// Probability (in percent) that a row with at least two states is symbolic.
    pub symbolic_percent: u32,
}

impl GenConfig {
    pub fn new(nodes: usize, vars: usize) -> Self {
        GenConfig { nodes, vars, max_states: 10, max_parents: 3, symbolic_percent: 50 }
    }

    pub fn with_max_states(mut self, max_states: usize) -> Self {
        self.max_states = max_states;
        self
    }
}

/// A generated model with the suggested hard-evidence query: the first state of
/// `target` given the first state of the evidence node.
#[derive(Clone, Debug)]
pub struct Generated {
    pub model: ConstrainedBN,
    pub query: MarginalSpec,
}

fn constant_row(rng: &mut ChaCha8Rng, k: usize) -> Vec<Term> {
    // every entry gets at least 1/100; the rest of the mass is cut at random points
    let spare = 100 - k as i64;
    let mut cuts: Vec<i64> = (0..k - 1).map(|_| rng.gen_range(0..=spare)).collect();
    cuts.push(0);
    cuts.push(spare);
    cuts.sort_unstable();
    cuts.windows(2).map(|w| Term::constant(Rational::new((w[1] - w[0] + 1).into(), 100.into()))).collect()
}

fn symbolic_row(rng: &mut ChaCha8Rng, k: usize, var: &Name) -> Vec<Term> {
    let mut row = vec![Term::int(0); k];
    let other = rng.gen_range(1..k);
    let x = Term::Var(var.clone());
    let one_minus = Term::int(1) - x.clone();
    if rng.gen_bool(0.5) {
        row[0] = x;
        row[other] = one_minus;
    } else {
        row[0] = one_minus;
        row[other] = x;
    }
    row
}

pub fn generate(seed: u64, cfg: &GenConfig) -> Result<Generated, crate::model::ModelError> {
    assert!(cfg.nodes > 0 && cfg.max_states > 0 && cfg.max_states <= 99);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<Name> = (1..=cfg.vars).map(|i| Name::from(format!("x{i}").as_str())).collect();
    let mut nodes: Vec<NodeSpec> = Vec::with_capacity(cfg.nodes);
    for i in 0..cfg.nodes {
        let k = rng.gen_range(1..=cfg.max_states);
        let states: Vec<Name> = (0..k).map(|s| Name::from(format!("s{s}").as_str())).collect();
        let mut candidates: Vec<usize> = (0..i).collect();
        candidates.shuffle(&mut rng);
        let indegree = rng.gen_range(0..=cfg.max_parents.min(i));
        let mut chosen: Vec<usize> = candidates.into_iter().take(indegree).collect();
        chosen.sort_unstable();
        let parents: Vec<Name> = chosen.iter().map(|&p| nodes[p].name.clone()).collect();
        let rows: usize = chosen.iter().map(|&p| nodes[p].states.len()).product();
        let mut table = Vec::with_capacity(rows * k);
        for _ in 0..rows {
            let symbolic = k >= 2 && !vars.is_empty() && rng.gen_range(0..100) < cfg.symbolic_percent;
            if symbolic {
                let v = vars.choose(&mut rng).expect("nonempty");
                table.extend(symbolic_row(&mut rng, k, v));
            } else {
                table.extend(constant_row(&mut rng, k));
            }
        }
        nodes.push(NodeSpec::new(Name::from(format!("n{i}").as_str()), states, parents, table));
    }
    let evidence = rng.gen_range(0..cfg.nodes);
    let target = if cfg.nodes == 1 { 0 } else { (evidence + rng.gen_range(1..cfg.nodes)) % cfg.nodes };
    let mut query = MarginalSpec::new(&nodes[target].name, &nodes[target].states[0]);
    if target != evidence {
        query = query.given(&nodes[evidence].name, &nodes[evidence].states[0]);
    }
    let mut constraints = Vec::new();
    for v in &vars {
        constraints.push(Constraint::Leq(Term::int(0), Term::Var(v.clone())));
        constraints.push(Constraint::Leq(Term::Var(v.clone()), Term::int(1)));
    }
    let model = ConstrainedBN::new(
        nodes,
        vars.into_iter().collect(),
        BTreeSet::new(),
        constraints,
        BTreeMap::new(),
        InferenceOptions::default(),
    )?;
    Ok(Generated { model, query })
}

/// One timed symbolic inference.
#[derive(Clone, Debug, PartialEq)]
pub struct StressRow {
    pub seed: u64,
    pub nodes: usize,
    pub x_vars: usize,
    pub total_states: usize,
    /// Characters in the printed marginal (`N` or `N / D`).
    pub marginal_len: usize,
    pub seconds: f64,
    /// Set when inference did not complete (for instance the width cap).
    pub error: Option<String>,
}

pub const STRESS_HEADER: &str = "nodes,x_vars,total_states,marginal_len,seconds";

impl StressRow {
    pub fn csv(&self) -> String {
        format!("{},{},{},{},{:.6}", self.nodes, self.x_vars, self.total_states, self.marginal_len, self.seconds)
    }
}

/// Times the symbolic junction tree on the generated query of one model.
pub fn time_inference(seed: u64, g: &Generated, opts: &InferenceOptions) -> StressRow {
    let start = Instant::now();
    let result: Result<_, InferenceError> = symbolic_marginal(&g.model, &g.query, opts);
    let elapsed: Duration = start.elapsed();
    let (marginal_len, error) = match result {
        Ok(def) => {
            let text = if def.denominator.is_one() {
                def.numerator.to_string()
            } else {
                format!("{} / {}", def.numerator, def.denominator)
            };
            (text.len(), None)
        }
        Err(e) => (0, Some(e.to_string())),
    };
    StressRow {
        seed,
        nodes: g.model.nodes().len(),
        x_vars: g.model.x_vars().len(),
        total_states: g.model.nodes().iter().map(|n| n.states.len()).sum(),
        marginal_len,
        seconds: elapsed.as_secs_f64(),
        error,
    }
}

/// Parameters of the `k`-th stress model: 3–12 nodes and 1–3 variables, drawn
/// from the harness seed.
pub fn stress_config(seed: u64, k: usize) -> (u64, GenConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    let nodes = rng.gen_range(3..=12);
    let vars = rng.gen_range(1..=3);
    (rng.gen(), GenConfig::new(nodes, vars))
}

/// Generates and times `count` models, `jobs` at a time. Rows come back in model order.
pub fn run_stress(seed: u64, count: usize, jobs: usize, opts: &InferenceOptions) -> Vec<StressRow> {
    let jobs = jobs.max(1);
    let mut rows: Vec<Option<StressRow>> = vec![None; count];
    std::thread::scope(|scope| {
        let chunks: Vec<(usize, &mut [Option<StressRow>])> = {
            let size = count.div_ceil(jobs).max(1);
            rows.chunks_mut(size).enumerate().map(|(i, c)| (i * size, c)).collect()
        };
        for (offset, chunk) in chunks {
            scope.spawn(move || {
                for (j, slot) in chunk.iter_mut().enumerate() {
                    let (model_seed, cfg) = stress_config(seed, offset + j);
                    *slot = Some(match generate(model_seed, &cfg) {
                        Ok(g) => time_inference(model_seed, &g, opts),
                        Err(e) => StressRow {
                            seed: model_seed,
                            nodes: cfg.nodes,
                            x_vars: cfg.vars,
                            total_states: 0,
                            marginal_len: 0,
                            seconds: 0.0,
                            error: Some(e.to_string()),
                        },
                    });
                }
            });
        }
    });
    rows.into_iter().map(|r| r.expect("every slot is filled")).collect()
}

pub fn stress_csv(rows: &[StressRow]) -> String {
    let mut out = String::from(STRESS_HEADER);
    out.push('\n');
    for r in rows.iter().filter(|r| r.error.is_none()) {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

/// Median inference time per node-count bucket `3–5`, `6–8`, `9–12`.
#[derive(Clone, Debug, PartialEq)]
pub struct BucketSummary {
    pub label: &'static str,
    pub count: usize,
    pub median_seconds: Option<f64>,
}

pub fn bucket_medians(rows: &[StressRow]) -> Vec<BucketSummary> {
    const BUCKETS: [(&str, usize, usize); 3] = [("3-5", 3, 5), ("6-8", 6, 8), ("9-12", 9, 12)];
    BUCKETS
        .iter()
        .map(|&(label, lo, hi)| {
            let mut times: Vec<f64> = rows
                .iter()
                .filter(|r| r.error.is_none() && (lo..=hi).contains(&r.nodes))
                .map(|r| r.seconds)
                .collect();
            times.sort_by(f64::total_cmp);
            let median = match times.len() {
                0 => None,
                n if n % 2 == 1 => Some(times[n / 2]),
                n => Some((times[n / 2 - 1] + times[n / 2]) / 2.0),
            };
            BucketSummary { label, count: times.len(), median_seconds: median }
        })
        .collect()
}

/// Whether bucket medians never decrease (empty buckets are ignored).
pub fn medians_nondecreasing(buckets: &[BucketSummary]) -> bool {
    let m: Vec<f64> = buckets.iter().filter_map(|b| b.median_seconds).collect();
    m.windows(2).all(|w| w[0] <= w[1])
}
