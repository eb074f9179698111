//! One function per subcommand, each producing a report.

use std::path::Path;

use cbn::compose::{union, ComposeError, RenamePolicy, UnionRecipe};
use cbn::inference::{symbolic_marginal, InferenceOptions, MarginalDefinition};
use cbn::logic::{
    check_consistent, judge_may_query, judge_must, DecisionProcedure, LogicError, SmtSolver, SolverConfig, Status,
    Truth, VACUOUS_WARNING,
};
use cbn::model::{check_sound, load_model_with, print_model, validate_well_formed, ConstrainedBN, MarginalSpec, ModelError, SoundVerdict};
use cbn::optimize::{inf_star, sup_star, IntervalResult, OptimizeError, OptimizeOptions, Outcome};
use cbn::random::{bucket_medians, generate, medians_nondecreasing, run_stress, stress_csv, GenConfig};
use cbn::rational::{render, Rational};
use cbn::sensitivity::{check_defined, describe, sensitivity_value, Reading, SensitivityError, SensitivitySpec};
use cbn::terms::{evaluate, parse_constraint, parse_query, parse_term, Assignment, Constraint};
use serde_json::{json, Value};

use crate::report::{hash_file, number, sha256_hex, Report};
use crate::{Cli, CliError, Command, Exit, Global, Mode, Optimize};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { model } => validate(g, model),
        Command::Judge { model, mode, phi } => judge(g, model, *mode, phi),
        Command::Sup(o) => optimize(g, o, true),
        Command::Inf(o) => optimize(g, o, false),
        Command::Marginal { model, mp, node, state, given } => marginal(g, model, mp, node, state, given),
        Command::Compose { left, right, links, left_suffix, right_suffix, output } => {
            compose(g, left, right, links, left_suffix, right_suffix, output.as_deref())
        }
        Command::Sensitivity { model, hypothesis, evidence, raw, bounds, csv, var, from, to, steps, output } => {
            let sampling = csv.as_deref().map(|path| Sampling { path, var: var.as_deref(), from, to, steps: *steps });
            sensitivity(g, model, hypothesis, evidence, *raw, bounds.as_deref(), sampling, output.as_deref())
        }
        Command::GenRandom { nodes, vars, max_states, output } => gen_random(g, *nodes, *vars, *max_states, output.as_deref()),
        Command::Stress { count, jobs, csv } => stress(g, *count, *jobs, csv.as_deref()),
    }
}

fn inference_options(g: &Global) -> InferenceOptions {
    InferenceOptions { denominator_guard: !g.no_denominator_guard, ..InferenceOptions::default() }
}

fn load(g: &Global, path: &Path) -> Result<ConstrainedBN> {
    load_model_with(path, inference_options(g)).map_err(CliError::usage)
}

fn open_solver(g: &Global) -> Result<SmtSolver> {
    let cfg = match &g.solver {
        Some(p) => SolverConfig::new(p),
        None => SolverConfig::from_env().ok_or_else(|| CliError::unknown("no SMT solver found (use --solver or CBN_SOLVER)"))?,
    };
    let cfg = SolverConfig { timeout_ms: g.timeout.saturating_mul(1000), seed: g.seed, ..cfg };
    SmtSolver::start(cfg).map_err(CliError::unknown)
}

fn logic_error(e: LogicError) -> CliError {
    match e {
        LogicError::Solver(_) => CliError::unknown(e),
        _ => CliError::usage(e),
    }
}

fn rational_arg(what: &str, s: &str) -> Result<Rational> {
    let t = parse_term(s).map_err(|e| CliError::usage(format!("{what}: {e}")))?;
    evaluate(&t, &Assignment::new()).map_err(|e| CliError::usage(format!("{what}: {e}")))
}

fn pair_arg(what: &str, s: &str) -> Result<(String, String)> {
    match s.split_once('=') {
        Some((n, v)) if !n.trim().is_empty() && !v.trim().is_empty() => Ok((n.trim().into(), v.trim().into())),
        _ => Err(CliError::usage(format!("{what}: expected node=state, got '{s}'"))),
    }
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Sat => "sat",
        Status::Unsat => "unsat",
        Status::Unknown => "unknown",
    }
}

fn truth_text(t: Truth) -> &'static str {
    match t {
        Truth::Holds => "holds",
        Truth::Fails => "fails",
        Truth::Unknown => "unknown",
    }
}

fn validate(g: &Global, path: &Path) -> Result<Report> {
    let mut r = Report::new("validate", Some(hash_file(path).map_err(CliError::usage)?));
    r.input("model", path.display().to_string());
    let b = match load_model_with(path, inference_options(g)) {
        Ok(b) => b,
        Err(e @ (ModelError::Json(_) | ModelError::Schema(_))) => return Err(CliError::usage(e)),
        Err(e) => {
            r.outcome(json!({"well_formed": false, "violations": [e.to_string()], "sound": null, "consistent": null}));
            r.exit(Exit::Fail);
            return Ok(r);
        }
    };
    let violations: Vec<Value> = validate_well_formed(&b)
        .iter()
        .map(|v| json!({"var": v.var.as_ref(), "rule": v.rule, "message": v.message}))
        .collect();
    let well_formed = violations.is_empty();
    let mut z3 = open_solver(g)?;
    r.input("solver", z3.describe());
    let sound = check_sound(&b, &mut z3).map_err(CliError::unknown)?;
    let consistent = check_consistent(&b, &mut z3).map_err(logic_error)?;
    let (sound_text, unsound_witness) = match &sound {
        SoundVerdict::Sound => ("sound", None),
        SoundVerdict::UnsoundWitness(w) => ("unsound", Some(w)),
        SoundVerdict::Unknown(reason) => {
            r.warn(format!("soundness undetermined: {reason}"));
            ("unknown", None)
        }
    };
    if let Some(reason) = &consistent.reason {
        r.warn(format!("consistency undetermined: {reason}"));
    }
    r.outcome(json!({
        "well_formed": well_formed,
        "violations": violations,
        "sound": sound_text,
        "consistent": status_text(consistent.status),
    }));
    // an unsoundness witness is the more informative one to report
    r.witness(unsound_witness.or(consistent.witness.as_ref()));
    let exit = if !well_formed || sound_text == "unsound" || consistent.is_unsat() {
        Exit::Fail
    } else if sound_text == "unknown" || consistent.status == Status::Unknown {
        Exit::Unknown
    } else {
        Exit::Ok
    };
    r.exit(exit);
    Ok(r)
}

fn judge(g: &Global, path: &Path, mode: Mode, phi: &str) -> Result<Report> {
    let b = load(g, path)?;
    let mut r = Report::new("judge", Some(hash_file(path).map_err(CliError::usage)?));
    let mut z3 = open_solver(g)?;
    r.input("model", path.display().to_string());
    r.input("mode", match mode {
        Mode::May => "may",
        Mode::Must => "must",
    });
    r.input("phi", phi);
    r.input("solver", z3.describe());
    match mode {
        Mode::May => {
            let q = parse_query(phi).map_err(CliError::usage)?;
            let v = judge_may_query(&b, &q, &mut z3).map_err(logic_error)?;
            let truth = match v.status {
                Status::Sat => Truth::Holds,
                Status::Unsat => Truth::Fails,
                Status::Unknown => Truth::Unknown,
            };
            r.outcome(json!({"judgment": truth_text(truth), "status": status_text(v.status)}));
            r.witness(v.witness.as_ref());
            if let Some(reason) = v.reason {
                r.warn(reason);
            }
            r.exit(exit_of(truth));
        }
        Mode::Must => {
            let c = parse_constraint(phi).map_err(CliError::usage)?;
            let v = judge_must(&b, &c, &mut z3).map_err(logic_error)?;
            r.outcome(json!({"judgment": truth_text(v.truth), "vacuous": v.vacuous}));
            r.witness(v.counterexample.as_ref());
            if v.vacuous {
                r.warn(VACUOUS_WARNING);
            } else if let Some(reason) = v.reason {
                r.warn(reason);
            }
            r.exit(exit_of(v.truth));
        }
    }
    r.stat("sat_checks", z3.checks());
    Ok(r)
}

fn exit_of(t: Truth) -> Exit {
    match t {
        Truth::Holds => Exit::Ok,
        Truth::Fails => Exit::Fail,
        Truth::Unknown => Exit::Unknown,
    }
}

fn optimize_error(e: OptimizeError) -> CliError {
    match e {
        OptimizeError::NonPositiveDelta => CliError::usage(e),
        OptimizeError::Logic(l) => logic_error(l),
        OptimizeError::Precondition(_) | OptimizeError::Unbounded(_) => CliError::fail(e),
        _ => CliError::unknown(e),
    }
}

/// Fills outcome, witness and stats of an interval result.
fn interval_report(r: &mut Report, res: &IntervalResult, timings: bool) {
    let mut outcome = json!({"kind": res.outcome.tag(), "branch": res.stats.branch});
    if let Outcome::Interval { low, high, .. } = &res.outcome {
        outcome["low"] = number(low);
        outcome["high"] = number(high);
    }
    r.outcome(outcome);
    r.witness(res.outcome.witness());
    r.stat("sat_checks", res.stats.sat_checks);
    if let Some(run) = &res.stats.run {
        r.stat("algorithm", json!(run.algorithm));
        r.stat("run_sat_checks", run.sat_checks);
        r.stat("initial_cache", render(&run.initial_cache));
        r.stat("bound", json!(run.printed_bound()));
        r.stat("bound_holds", json!(run.printed_bound().map(|b| run.counted_by_printed_bound() <= b)));
        r.stat("derived_bound", run.derived_bound());
        r.stat("early_return", run.early_return);
    }
    if timings {
        r.stat("wall_time_ms", res.stats.wall_time.as_millis() as u64);
    }
    if res.outcome == Outcome::Inconsistent {
        r.exit(Exit::Fail);
    }
}

fn optimize(g: &Global, o: &Optimize, is_sup: bool) -> Result<Report> {
    let b = load(g, &o.model)?;
    let t = parse_term(&o.term).map_err(CliError::usage)?;
    let delta = rational_arg("--delta", &o.delta)?;
    let mut z3 = open_solver(g)?;
    let mut r = Report::new(if is_sup { "sup" } else { "inf" }, Some(hash_file(&o.model).map_err(CliError::usage)?));
    r.input("model", o.model.display().to_string());
    r.input("term", o.term.as_str());
    r.input("delta", render(&delta));
    r.input("solver", z3.describe());
    let opts = OptimizeOptions::default();
    let res = if is_sup { sup_star(&b, &t, &delta, &mut z3, opts) } else { inf_star(&b, &t, &delta, &mut z3, opts) }
        .map_err(optimize_error)?;
    interval_report(&mut r, &res, !g.no_timings);
    Ok(r)
}

fn definition_json(def: &MarginalDefinition) -> Value {
    json!({
        "mp": def.mp.as_ref(),
        "numerator": def.numerator.to_string(),
        "denominator": def.denominator.to_string(),
        "constraints": def.constraints.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "guarded": def.guarded,
    })
}

fn marginal(
    g: &Global,
    path: &Path,
    mp: &Option<String>,
    node: &Option<String>,
    state: &Option<String>,
    given: &[String],
) -> Result<Report> {
    let b = load(g, path)?;
    let mut r = Report::new("marginal", Some(hash_file(path).map_err(CliError::usage)?));
    r.input("model", path.display().to_string());
    let (spec, def) = match (mp, node, state) {
        (Some(mp), _, _) => {
            let def = b.definitions().get(mp.as_str()).ok_or_else(|| CliError::usage(format!("no marginal '{mp}'")))?;
            (b.marginals()[mp.as_str()].clone(), def.clone())
        }
        (None, Some(node), Some(state)) => {
            let mut spec = MarginalSpec::new(node, state);
            for e in given {
                let (n, s) = pair_arg("--given", e)?;
                spec = spec.given(&n, &s);
            }
            let def = symbolic_marginal(&b, &spec, b.options()).map_err(CliError::fail)?;
            (spec, def)
        }
        _ => return Err(CliError::usage("give --mp, or --node and --state")),
    };
    r.input("query", serde_json::to_value(&spec).expect("spec serializes"));
    r.outcome(definition_json(&def));
    Ok(r)
}

fn compose(
    g: &Global,
    left: &Path,
    right: &Path,
    links: &[String],
    left_suffix: &Option<String>,
    right_suffix: &Option<String>,
    output: Option<&Path>,
) -> Result<Report> {
    let (lb, rb) = (load(g, left)?, load(g, right)?);
    let parsed: Vec<Constraint> =
        links.iter().map(|l| parse_constraint(l).map_err(CliError::usage)).collect::<Result<_>>()?;
    let policy = match (left_suffix, right_suffix) {
        (None, None) => RenamePolicy::RejectCollisions,
        (l, r) => RenamePolicy::AutoSuffix {
            left: l.clone().unwrap_or_default(),
            right: r.clone().unwrap_or_default(),
        },
    };
    let recipe = UnionRecipe { left: lb, right: rb, links: parsed, policy };
    let comp = union(&recipe).map_err(|e| match e {
        ComposeError::Model(_) | ComposeError::SameSuffix => CliError::usage(e),
        _ => CliError::fail(e),
    })?;
    let text = print_model(&comp.model);
    let mut r = Report::new("compose", Some(sha256_hex(text.as_bytes())));
    r.input("left", json!({"path": left.display().to_string(), "hash": hash_file(left).map_err(CliError::usage)?}));
    r.input("right", json!({"path": right.display().to_string(), "hash": hash_file(right).map_err(CliError::usage)?}));
    r.input("links", links.to_vec());
    if let Some(out) = output {
        std::fs::write(out, &text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", out.display())))?;
        r.input("output", out.display().to_string());
    }
    let sound = match open_solver(g) {
        Ok(mut z3) => {
            r.input("solver", z3.describe());
            match comp.check_sound(&mut z3).map_err(logic_error)? {
                SoundVerdict::Sound => "sound",
                SoundVerdict::UnsoundWitness(w) => {
                    r.witness(Some(&w));
                    r.exit(Exit::Fail);
                    "unsound"
                }
                SoundVerdict::Unknown(reason) => {
                    r.warn(format!("soundness undetermined: {reason}"));
                    r.exit(Exit::Unknown);
                    "unknown"
                }
            }
        }
        Err(e) => {
            r.warn(format!("soundness not checked: {}", e.message));
            r.exit(Exit::Unknown);
            "unchecked"
        }
    };
    r.outcome(json!({
        "nodes": comp.model.nodes().iter().map(|n| n.name.as_ref()).collect::<Vec<_>>(),
        "variables": {
            "x": comp.model.x_vars().iter().map(|v| v.as_ref()).collect::<Vec<_>>(),
            "mp": comp.model.mp_vars().iter().map(|v| v.as_ref()).collect::<Vec<_>>(),
        },
        "renames": comp.renames,
        "sound": sound,
    }));
    Ok(r)
}

struct Sampling<'a> {
    path: &'a Path,
    var: Option<&'a str>,
    from: &'a str,
    to: &'a str,
    steps: u32,
}

fn sensitivity_error(e: SensitivityError) -> CliError {
    match e {
        SensitivityError::Logic(l) => logic_error(l),
        SensitivityError::Undefined => CliError::fail(e),
        _ => CliError::usage(e),
    }
}

#[allow(clippy::too_many_arguments)]
fn sensitivity(
    g: &Global,
    path: &Path,
    hypothesis: &str,
    evidence: &str,
    raw: bool,
    bounds: Option<&str>,
    sampling: Option<Sampling>,
    output: Option<&Path>,
) -> Result<Report> {
    let b = load(g, path)?;
    let (hn, hs) = pair_arg("--hypothesis", hypothesis)?;
    let (en, es) = pair_arg("--evidence", evidence)?;
    let reading = if raw { Reading::Raw } else { Reading::Coarsened };
    let spec = SensitivitySpec::new((&hn, &hs), (&en, &es)).with_reading(reading);
    let s = sensitivity_value(&b, &spec).map_err(sensitivity_error)?;
    let mut r = Report::new("sensitivity", Some(hash_file(path).map_err(CliError::usage)?));
    r.input("model", path.display().to_string());
    r.input("spec", serde_json::to_value(&spec).expect("spec serializes"));
    let aux = if b.is_declared("s") { "s_sensitivity" } else { "s" };
    let mut outcome = json!({
        "closed_form": describe(&s),
        "numerator": s.numerator().to_string(),
        "denominator": s.denominator().to_string(),
        "variable": aux,
        "constraints": s.constraints(aux).iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "components": {
            "PO": s.components.po.to_string(),
            "Px": s.components.px.to_string(),
            "POx": s.components.pox.to_string(),
            "PxO": s.components.pxo.to_string(),
        },
    });
    if let Some(sm) = sampling {
        let vars = s.closed_form.num().vars().union(&s.closed_form.den().vars()).cloned().collect::<Vec<_>>();
        let var = match (sm.var, vars.as_slice()) {
            (Some(v), _) => v.to_string(),
            (None, [only]) => only.to_string(),
            (None, _) => b.x_vars().iter().next().map(|v| v.to_string()).ok_or_else(|| CliError::usage("--csv needs --var"))?,
        };
        if vars.iter().any(|v| v.as_ref() != var) {
            return Err(CliError::usage("--csv needs the closed form to depend on the sampled variable only"));
        }
        let csv = s.sample_csv(&var, &rational_arg("--from", sm.from)?, &rational_arg("--to", sm.to)?, sm.steps, &Assignment::new());
        std::fs::write(sm.path, csv).map_err(|e| CliError::usage(format!("cannot write {}: {e}", sm.path.display())))?;
        r.input("csv", sm.path.display().to_string());
    }
    if let Some(delta) = bounds {
        let delta = rational_arg("--bounds", delta)?;
        let mut z3 = open_solver(g)?;
        r.input("solver", z3.describe());
        check_defined(&b, &s, &mut z3).map_err(sensitivity_error)?;
        let with_s = s.install(&b, aux).map_err(CliError::usage)?;
        let t = parse_term(aux).expect("variable name parses");
        let opts = OptimizeOptions::default();
        let hi = sup_star(&with_s, &t, &delta, &mut z3, opts).map_err(optimize_error)?;
        let lo = inf_star(&with_s, &t, &delta, &mut z3, opts).map_err(optimize_error)?;
        let side = |res: &IntervalResult| match &res.outcome {
            Outcome::Interval { low, high, .. } => json!({"low": number(low), "high": number(high)}),
            other => json!({"kind": other.tag()}),
        };
        outcome["sup"] = side(&hi);
        outcome["inf"] = side(&lo);
        r.stat("sat_checks", hi.stats.sat_checks + lo.stats.sat_checks);
    }
    if let Some(out) = output {
        let text = serde_json::to_string_pretty(&outcome).expect("json") + "\n";
        std::fs::write(out, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", out.display())))?;
    }
    r.outcome(outcome);
    Ok(r)
}

fn gen_random(g: &Global, nodes: usize, vars: usize, max_states: usize, output: Option<&Path>) -> Result<Report> {
    if nodes == 0 || max_states == 0 || max_states > 99 {
        return Err(CliError::usage("--nodes must be positive and --max-states within 1..=99"));
    }
    let cfg = GenConfig::new(nodes, vars).with_max_states(max_states);
    let generated = generate(g.seed, &cfg).map_err(CliError::fail)?;
    let text = print_model(&generated.model);
    let mut r = Report::new("gen-random", Some(sha256_hex(text.as_bytes())));
    r.input("seed", g.seed);
    r.input("nodes", nodes);
    r.input("vars", vars);
    r.input("max_states", max_states);
    let query = serde_json::to_value(&generated.query).expect("spec serializes");
    match output {
        Some(out) => {
            std::fs::write(out, &text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", out.display())))?;
            r.input("output", out.display().to_string());
            r.outcome(json!({"suggested_marginal": query}));
        }
        None => {
            let model: Value = serde_json::from_str(&text).expect("printed model is JSON");
            r.outcome(json!({"suggested_marginal": query, "model": model}));
        }
    }
    Ok(r)
}

fn stress(g: &Global, count: usize, jobs: usize, csv: Option<&Path>) -> Result<Report> {
    let rows = run_stress(g.seed, count, jobs, &inference_options(g));
    let mut r = Report::new("stress", None);
    r.input("seed", g.seed);
    r.input("count", count);
    r.input("jobs", jobs);
    if let Some(path) = csv {
        std::fs::write(path, stress_csv(&rows)).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
        r.input("csv", path.display().to_string());
    }
    let errors: Vec<Value> = rows
        .iter()
        .filter_map(|row| row.error.as_ref().map(|e| json!({"seed": row.seed, "nodes": row.nodes, "error": e})))
        .collect();
    let buckets = bucket_medians(&rows);
    let monotone = medians_nondecreasing(&buckets);
    let bucket_json: Vec<Value> = buckets
        .iter()
        .map(|bk| {
            let mut v = json!({"nodes": bk.label, "count": bk.count});
            if !g.no_timings {
                v["median_seconds"] = json!(bk.median_seconds);
            }
            v
        })
        .collect();
    if !errors.is_empty() {
        r.exit(Exit::Fail);
    }
    let mut outcome = json!({
        "models": rows.len(),
        "completed": rows.len() - errors.len(),
        "errors": errors,
        "buckets": bucket_json,
    });
    // the trend is a timing artefact, so it is left out of timing-free reports
    if !g.no_timings {
        outcome["medians_nondecreasing"] = json!(monotone);
        if !monotone {
            r.warn("median inference time decreases across node-count buckets");
        }
    }
    r.outcome(outcome);
    Ok(r)
}
