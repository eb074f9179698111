//! Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//!
//! A FAIL line is an honest report that a stated target is not met by the
//! faithful computation; the run still succeeds as long as the computation
//! produced exactly the documented result. Any unexpected result aborts the run
//! with a non-zero exit code.

mod common;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use cbn::compose::{union, RenamePolicy, UnionRecipe};
use cbn::inference::{enumerate_joint, query_joint, symbolic_marginal, InferenceOptions, DEFAULT_JOINT_CAP};
use cbn::logic::{judge_may, judge_must, SmtSolver, Status, Truth};
use cbn::model::{concretize, load_model, ConstrainedBN, MarginalSpec};
use cbn::optimize::{inf_star, midpoint, sup_star, Branch, IntervalResult, OptimizeOptions, RunStats};
use cbn::random::{bucket_medians, medians_nondecreasing, run_stress, stress_csv};
use cbn::rational::{abs, parse_decimal, ratio, to_f64};
use cbn::sensitivity::{check_defined, sensitivity_value, SensitivitySpec};
use cbn::terms::{evaluate, name, parse_constraint, parse_term, Assignment, Constraint, Polynomial, Term};
use cbn::Rational;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Pass,
    Fail,
    Skip,
}

struct Line {
    verdict: Verdict,
    text: String,
}

type Check = Result<Line, String>;

fn pass(text: impl Into<String>) -> Check {
    Ok(Line { verdict: Verdict::Pass, text: text.into() })
}

fn verdict(ok: bool, text: impl Into<String>) -> Check {
    Ok(Line { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, text: text.into() })
}

fn skip() -> Check {
    Ok(Line { verdict: Verdict::Skip, text: "no SMT solver available".into() })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn dec(s: &str) -> Rational {
    match s.strip_prefix('-') {
        Some(rest) => -parse_decimal(rest).expect("decimal literal"),
        None => parse_decimal(s).expect("decimal literal"),
    }
}

fn poly(src: &str) -> Polynomial {
    Polynomial::from_term(&parse_term(src).expect("term")).expect("polynomial")
}

fn load(file: &str) -> ConstrainedBN {
    load_model(&common::models_dir().join(file)).expect("bundled model loads")
}

/// Distance from `v` to the closed interval of an interval outcome.
fn distance(r: &IntervalResult, v: &Rational) -> Option<Rational> {
    let (l, h) = r.outcome.interval()?;
    Some(if v < l {
        l - v
    } else if v > h {
        v - h
    } else {
        Rational::from_integer(0.into())
    })
}

fn show(r: &IntervalResult) -> String {
    match r.outcome.interval() {
        Some((l, h)) => format!("[{:.12}, {:.12}]", to_f64(l), to_f64(h)),
        None => r.outcome.tag().to_string(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

/// Joint-enumeration value of `spec` in `b` at `a`.
fn joint_query(b: &ConstrainedBN, a: &Assignment, specs: &[&MarginalSpec]) -> Option<Vec<Rational>> {
    let c = concretize(b, a).ok()?;
    let joint = enumerate_joint(&c, DEFAULT_JOINT_CAP).ok()?;
    specs.iter().map(|s| query_joint(&joint, s).ok()).collect()
}

fn at(pairs: &[(&str, Rational)]) -> Assignment {
    pairs.iter().map(|(v, r)| (name(v), r.clone())).collect()
}

/// The composed wet-grass model with `diff = mp_W - mp_Wp`.
fn composed() -> Result<ConstrainedBN, String> {
    let links = ["2*z = x", "diff = mp_W - mp_Wp"].iter().map(|l| parse_constraint(l).unwrap()).collect();
    let recipe = UnionRecipe {
        left: load("grass_wet.json"),
        right: load("grass_wet_rain3.json"),
        links,
        policy: RenamePolicy::AutoSuffix { left: String::new(), right: "2".into() },
    };
    Ok(union(&recipe).map_err(err)?.model)
}

fn constraints(src: &[&str]) -> Vec<Constraint> {
    src.iter().map(|c| parse_constraint(c).unwrap()).collect()
}

struct Suite {
    z3: Option<SmtSolver>,
    opts: OptimizeOptions,
    /// Runs whose check counts are audited by criterion 10.
    audited: Vec<(String, RunStats)>,
    /// Runs outside criteria 5–7, reported for information only.
    extra: Vec<(String, RunStats)>,
}

impl Suite {
    fn record(&mut self, label: &str, r: &IntervalResult, audited: bool) {
        if let Some(run) = &r.stats.run {
            let entry = (label.to_string(), run.clone());
            if audited {
                self.audited.push(entry);
            } else {
                self.extra.push(entry);
            }
        }
    }

    fn c1(&mut self) -> Check {
        const HOLMES_WET: &str = "0.495*x*x + 0.5*x*(-0.95*x + 0.95) + 0.7*x*(-0.5*x + 1) + 1.0*(-0.5*x + 1)*(-0.05*x + 0.05)";
        let start = Instant::now();
        let b = load("grass_wet.json");
        let def = symbolic_marginal(&b, &MarginalSpec::new("HolmesWet", "T"), &InferenceOptions::default()).map_err(err)?;
        let elapsed = start.elapsed();
        ensure(def.denominator.is_one(), || "unconditional marginal has a denominator".into())?;
        let identical = def.numerator == poly(HOLMES_WET);
        // independent of the polynomial code: tree evaluation of the printed form
        // agrees at more points than the degree
        let printed = parse_term(HOLMES_WET).unwrap();
        for k in 0..5 {
            let a = at(&[("x", ratio(k, 7))]);
            ensure(def.numerator.evaluate(&a).unwrap() == evaluate(&printed, &a).unwrap(), || format!("differs at x = {k}/7"))?;
        }
        verdict(identical && elapsed < Duration::from_secs(1), format!("p(HolmesWet=T) = {} ({})", def.numerator, secs(elapsed)))
    }

    fn c2(&mut self) -> Check {
        const N: &str =
            "0.3465*x*x + 0.025*x*(-0.95*x + 0.95) + 0.49*x*(-x*0.5 + 1) + 0.05*(-x*0.5 + 1)*(-0.05*x + 0.05)";
        const D: &str = "0.35*x*x + 0.025*x*(-0.95*x + 0.95) + 0.7*x*(-x*0.5 + 1) + 0.025*x*(-0.05*x + 0.05) \
                         + 0.05*(-0.95*x + 0.95)*(-x*0.5 + 1) + 0.05*(-x*0.5 + 1)*(-0.05*x + 0.05)";
        let start = Instant::now();
        let b = load("grass_wet.json");
        let spec = MarginalSpec::new("HolmesWet", "T").given("WatsonWet", "T");
        let def = symbolic_marginal(&b, &spec, &InferenceOptions::default()).map_err(err)?;
        let elapsed = start.elapsed();
        let (n, d) = (poly(N), poly(D));
        let lead = |p: &Polynomial| p.terms().next().map(|(m, c)| (m.clone(), c.clone()));
        let (Some((m, c_ours)), Some((_, _))) = (lead(&def.denominator), lead(&d)) else {
            return Err("empty denominator".into());
        };
        let scale = c_ours / d.coefficient(&m);
        let matches = def.numerator == n.scale(&scale) && def.denominator == d.scale(&scale);
        verdict(
            matches && elapsed < Duration::from_secs(1),
            format!("N and D match with common scale {} ({})", cbn::rational::render(&scale), secs(elapsed)),
        )
    }

    fn c3(&mut self) -> Check {
        let b = load("grass_wet.json");
        let p = &b.definitions()[&name("mp_H")].numerator;
        let v3 = p.evaluate(&at(&[("x", dec("0.3"))])).unwrap();
        let v1 = p.evaluate(&at(&[("x", dec("0.1"))])).unwrap();
        verdict(
            v3 == dec("0.35255") && v1 == dec("0.15695"),
            format!("mp_H(0.3) = {}, mp_H(0.1) = {}", cbn::rational::render(&v3), cbn::rational::render(&v1)),
        )
    }

    fn c4(&mut self) -> Check {
        let Some(z3) = self.z3.as_mut() else { return skip() };
        let b = load("grass_wet.json");
        let phi = parse_constraint("mp_H < 0.3").unwrap();
        let h = MarginalSpec::new("HolmesWet", "T");
        let exact_mp_h = |w: &cbn::logic::Witness| -> Result<Rational, String> {
            let x = w.get("x").ok_or("witness lacks x")?.clone();
            Ok(joint_query(&b, &at(&[("x", x)]), &[&h]).ok_or("witness is not a concretization")?[0].clone())
        };
        let start = Instant::now();
        let must = judge_must(&b, &phi, z3).map_err(err)?;
        let t_must = start.elapsed();
        let start = Instant::now();
        let may = judge_may(&b, &phi, z3).map_err(err)?;
        let t_may = start.elapsed();
        ensure(must.truth == Truth::Fails && !must.vacuous, || format!("must verdict {:?}", must.truth))?;
        ensure(may.status == Status::Sat, || format!("may verdict {:?}", may.status))?;
        let cx = exact_mp_h(must.counterexample.as_ref().ok_or("no counterexample")?)?;
        let wx = exact_mp_h(may.witness.as_ref().ok_or("no witness")?)?;
        let limit = Duration::from_secs(30);
        verdict(
            cx >= dec("0.3") && wx < dec("0.3") && t_must < limit && t_may < limit,
            format!(
                "must fails (mp_H = {:.6} at counterexample, {}), may holds (mp_H = {:.6} at witness, {})",
                to_f64(&cx),
                secs(t_must),
                to_f64(&wx),
                secs(t_may)
            ),
        )
    }

    fn c5(&mut self) -> Check {
        let opts = self.opts;
        let Some(z3) = self.z3.as_mut() else { return skip() };
        let b = load("grass_wet.json");
        let start = Instant::now();
        let r = sup_star(&b, &Term::var("mp_W"), &dec("1e-9"), z3, opts).map_err(err)?;
        let elapsed = start.elapsed();
        self.record("sup(mp_W)", &r, true);
        let (l, h) = r.outcome.interval().ok_or("no interval")?;
        let mid = midpoint(l, h);
        let ok = h - l <= dec("1e-9")
            && abs(&(&mid - dec("0.663714287"))) <= dec("1e-7")
            && elapsed < Duration::from_secs(300);
        verdict(ok, format!("sup(mp_W) in {} midpoint {:.10} ({})", show(&r), to_f64(&mid), secs(elapsed)))
    }

    fn c6(&mut self) -> Check {
        let opts = self.opts;
        let Some(z3) = self.z3.as_mut() else { return skip() };
        let b = composed()?;
        let diff = Term::var("diff");
        let start = Instant::now();
        let hi = sup_star(&b, &diff, &dec("1e-9"), z3, opts).map_err(err)?;
        let lo = inf_star(&b, &diff, &dec("1e-9"), z3, opts).map_err(err)?;
        let elapsed = start.elapsed();
        self.record("sup(diff)", &hi, true);
        self.record("inf(diff)", &lo, true);
        let tol = dec("1e-6");
        let ok = distance(&hi, &dec("0.13407950")).is_some_and(|d| d <= tol)
            && distance(&lo, &dec("-0.16427222")).is_some_and(|d| d <= tol)
            && elapsed < Duration::from_secs(900);
        verdict(ok, format!("sup(diff) in {}, inf(diff) in {} ({})", show(&hi), show(&lo), secs(elapsed)))
    }

    /// The stated target is unattainable: with only `0.1 <= x <= 0.2` added,
    /// `diff` is still positive somewhere (x = 0.2 with the heavy-rain weight y at
    /// its lower bound), so the positive branch is taken. The stated value is
    /// reproduced once `y` is also pinned by `5*y = 0.3`.
    fn c7(&mut self) -> Check {
        let opts = self.opts;
        let Some(z3) = self.z3.as_mut() else { return skip() };
        let tight = composed()?.with_constraints(constraints(&["0.1 <= x", "x <= 0.2"]));
        let diff = Term::var("diff");
        let r = sup_star(&tight, &diff, &dec("1e-9"), z3, opts).map_err(err)?;
        let target = dec("-0.05521950");
        let tol = dec("1e-6");
        let met = r.stats.branch == Branch::Negative && distance(&r, &target).is_some_and(|d| d <= tol);

        // the documented outcome, with an independent value at the witnessed corner
        let w = HOLMES_GIVEN_WATSON.clone();
        let left = joint_query(&load("grass_wet.json"), &at(&[("x", dec("0.2"))]), &[&w]).ok_or("left oracle")?;
        let right_spec = MarginalSpec::new("HolmesWet", "T").given("WatsonWet", "T");
        let right = joint_query(&load("grass_wet_rain3.json"), &at(&[("y", dec("0.02")), ("z", dec("0.1"))]), &[&right_spec])
            .ok_or("right oracle")?;
        let corner = &left[0] - &right[0];
        ensure(r.stats.branch == Branch::Positive, || format!("expected the positive branch, got {:?}", r.stats.branch))?;
        ensure(distance(&r, &corner).is_some_and(|d| d <= tol), || format!("{} misses corner value {corner}", show(&r)))?;
        self.record("sup(diff), 0.1 <= x <= 0.2", &r, true);

        let pinned = tight.with_constraints(constraints(&["5*y = 0.3"]));
        let p = sup_star(&pinned, &diff, &dec("1e-9"), self.z3.as_mut().unwrap(), opts).map_err(err)?;
        ensure(p.stats.branch == Branch::Negative && distance(&p, &target).is_some_and(|d| d <= tol), || {
            format!("pinned run: {:?} {}", p.stats.branch, show(&p))
        })?;
        self.record("sup(diff), 0.1 <= x <= 0.2, 5*y = 0.3", &p, false);
        verdict(
            met,
            format!(
                "positive branch, sup(diff) in {} = diff at x = 0.2, y = 0.02 ({:.10}); \
                 with 5*y = 0.3 also imposed: negative branch, {}",
                show(&r),
                to_f64(&corner),
                show(&p)
            ),
        )
    }

    fn c8(&mut self) -> Check {
        let start = Instant::now();
        let n = common::oracle_equivalence(200, 5, 8)?;
        let elapsed = start.elapsed();
        verdict(elapsed < Duration::from_secs(600), format!("{n} exact agreements on 200 models ({})", secs(elapsed)))
    }

    fn c9(&mut self) -> Check {
        let Some(z3) = self.z3.as_mut() else { return skip() };
        let s = common::judgment_laws(z3, 100, 9)?;
        common::vacuity(z3, 20, 90)?;
        verdict(
            s.undecided == 0,
            format!(
                "{} pairs ({} must-valid, {} unsatisfiable, {} unknown); 20 inconsistent models flagged vacuous",
                s.decided, s.must_valid, s.unsatisfiable, s.undecided
            ),
        )
    }

    /// The stated sup bound leaves out the final failing doubling guard and the
    /// rounding up of the bisection count, and the stated inf bound drops the
    /// `-log2(delta)` term from its bisection count, so either can fall short. The
    /// derived bound counts every check and must hold on every run.
    fn c10(&mut self) -> Check {
        if self.z3.is_none() {
            return skip();
        }
        let mut text = String::new();
        let mut all_within = !self.audited.is_empty();
        for (label, run) in &self.audited {
            let counted = run.counted_by_printed_bound();
            ensure(run.sat_checks <= run.derived_bound(), || {
                format!("{label}: {} checks exceed the derived bound {}", run.sat_checks, run.derived_bound())
            })?;
            let bound = run.printed_bound();
            all_within &= bound.is_some_and(|b| counted <= b);
            let stated = bound.map_or("undefined".into(), |b| b.to_string());
            let within = if bound.is_some_and(|b| counted <= b) { "within" } else { "ABOVE" };
            let _ = write!(
                text,
                "{label}: {counted} checks {within} stated bound {stated} (derived bound {}); ",
                run.derived_bound()
            );
        }
        for (label, run) in &self.extra {
            ensure(run.sat_checks <= run.derived_bound(), || format!("{label}: derived bound exceeded"))?;
            let _ = write!(
                text,
                "[info] {label}: {} counted vs stated bound {}, {} total vs derived bound {}; ",
                run.counted_by_printed_bound(),
                run.printed_bound().map_or("undefined".into(), |b| b.to_string()),
                run.sat_checks,
                run.derived_bound()
            );
        }
        verdict(all_within, text.trim_end_matches("; ").to_string())
    }

    fn c11(&mut self) -> Check {
        let opts = self.opts;
        let Some(z3) = self.z3.as_mut() else { return skip() };
        let b = load("tamper_toy.json");
        let (lo, hi) = (Rational::from_integer(0.into()), dec("0.6666"));
        let delta = dec("1e-7");
        let tol = dec("1e-6");
        let x_at = |x: &Rational| at(&[("x", x.clone())]);
        let close = |r: &IntervalResult, v: &Rational| distance(r, v).is_some_and(|d| d <= tol);
        let mut notes = Vec::new();

        // marginal bounds
        let tf = MarginalSpec::new("TamperFound", "Yes");
        let f = |x: &Rational| joint_query(&b, &x_at(x), &[&tf]).map(|v| v[0].clone());
        let (_, max) = common::grid_extremum(&f, &lo, &hi, 400, true);
        let (_, min) = common::grid_extremum(&f, &lo, &hi, 400, false);
        let s_tf = sup_star(&b, &Term::var("mp_tf"), &delta, z3, opts).map_err(err)?;
        let i_tf = inf_star(&b, &Term::var("mp_tf"), &delta, z3, opts).map_err(err)?;
        ensure(close(&s_tf, &max) && close(&i_tf, &min), || {
            format!("mp_tf: {} vs grid {max}, {} vs grid {min}", show(&s_tf), show(&i_tf))
        })?;
        notes.push(format!("mp_tf in [{:.8}, {:.8}]", to_f64(&min), to_f64(&max)));

        // threshold agreement between pool sizes 10 and 20
        let ten = MarginalSpec::new("TamperFound", "Yes").given("PoolSize", "Ten");
        let twenty = MarginalSpec::new("TamperFound", "Yes").given("PoolSize", "Twenty");
        let recipe = UnionRecipe {
            left: b.install_marginal(&ten, "mp_th").map_err(err)?,
            right: b.install_marginal(&twenty, "mp_th").map_err(err)?,
            links: constraints(&["0 < th", "th < 1"]),
            policy: RenamePolicy::AutoSuffix { left: String::new(), right: "_p".into() },
        };
        let comp = union(&recipe).map_err(err)?;
        let m20 = comp.renames.right_vars.get("mp_th").ok_or("right marginal not renamed")?.to_string();
        let phi1 = parse_constraint(&format!("th < mp_th & {m20} <= th")).unwrap();
        let phi2 = parse_constraint(&format!("th < {m20} & mp_th <= th")).unwrap();
        let phi_th = phi1.clone().or(phi2.clone()).negate();
        let g10 = |x: &Rational| joint_query(&b, &x_at(x), &[&ten]).map(|v| v[0].clone());
        let g20 = |x: &Rational| joint_query(&b, &x_at(x), &[&twenty]).map(|v| v[0].clone());
        let (_, ten_max) = common::grid_extremum(&g10, &lo, &hi, 400, true);
        let (_, ten_min) = common::grid_extremum(&g10, &lo, &hi, 400, false);
        let (_, tw_max) = common::grid_extremum(&g20, &lo, &hi, 400, true);
        let (_, tw_min) = common::grid_extremum(&g20, &lo, &hi, 400, false);
        // phi1 needs some threshold strictly below a 10-pool value and at or above a
        // 20-pool value; phi2 the reverse
        let expect1 = tw_min < ten_max;
        let expect2 = ten_min < tw_max;
        let sat1 = judge_may(&comp.model, &phi1, z3).map_err(err)?.status == Status::Sat;
        let sat2 = judge_may(&comp.model, &phi2, z3).map_err(err)?.status == Status::Sat;
        let agree = judge_must(&comp.model, &phi_th, z3).map_err(err)?;
        ensure(sat1 == expect1 && sat2 == expect2, || format!("may(phi1) = {sat1}, may(phi2) = {sat2}"))?;
        ensure((agree.truth == Truth::Holds) == !(expect1 || expect2), || format!("must(phi_th) = {:?}", agree.truth))?;
        for (label, phi, sup_v, inf_v, sat) in
            [("phi1", &phi1, &ten_max, &tw_min, sat1), ("phi2", &phi2, &tw_max, &ten_min, sat2)]
        {
            if !sat {
                continue;
            }
            let forced = comp.model.with_constraints([phi.clone()]);
            let th = Term::var("th");
            let s = sup_star(&forced, &th, &delta, z3, opts).map_err(err)?;
            let i = inf_star(&forced, &th, &delta, z3, opts).map_err(err)?;
            ensure(close(&s, sup_v) && close(&i, inf_v), || {
                format!("th under {label}: {} vs {sup_v}, {} vs {inf_v}", show(&s), show(&i))
            })?;
            notes.push(format!("th under {label} in [{:.8}, {:.8}]", to_f64(inf_v), to_f64(sup_v)));
        }

        // sensitivity of p(AuthCapability=Low) to the finding-tamper likelihood
        let spec = SensitivitySpec::new(("AuthCapability", "Low"), ("FindingTamper", "Yes"));
        let sv = sensitivity_value(&b, &spec).map_err(err)?;
        check_defined(&b, &sv, z3).map_err(err)?;
        let (h, e) = (MarginalSpec::new("AuthCapability", "Low"), MarginalSpec::new("FindingTamper", "Yes"));
        let (h_e, e_h) = (h.clone().given("FindingTamper", "Yes"), e.clone().given("AuthCapability", "Low"));
        let s_oracle = |x: &Rational| {
            let v = joint_query(&b, &x_at(x), &[&h, &e, &h_e, &e_h])?;
            let one = Rational::from_integer(1.into());
            let (po, px, pox, pxo) = (&v[0], &v[1], &v[2], &v[3]);
            let base = po * pxo + (&one - pox) * px;
            Some(po * (&one - pox) * px / (&base * &base))
        };
        for k in 1..20 {
            let x = &hi * ratio(k, 20);
            ensure(sv.evaluate(&x_at(&x)) == s_oracle(&x), || format!("closed form differs at x = {x}"))?;
        }
        let with_s = sv.install(&b, "s").map_err(err)?;
        let s_hi = sup_star(&with_s, &Term::var("s"), &delta, z3, opts).map_err(err)?;
        let s_lo = inf_star(&with_s, &Term::var("s"), &delta, z3, opts).map_err(err)?;
        let (_, smax) = common::grid_extremum(&s_oracle, &lo, &hi, 400, true);
        let (_, smin) = common::grid_extremum(&s_oracle, &lo, &hi, 400, false);
        ensure(close(&s_hi, &smax) && close(&s_lo, &smin), || {
            format!("s: {} vs grid {smax}, {} vs grid {smin}", show(&s_hi), show(&s_lo))
        })?;
        notes.push(format!("s in [{:.8}, {:.8}]", to_f64(&smin), to_f64(&smax)));
        pass(format!("bundled stand-in model, all within 1e-6 of grid oracles: {}", notes.join("; ")))
    }

    fn c12(&mut self) -> Check {
        let start = Instant::now();
        let rows = run_stress(12, 100, 1, &InferenceOptions::default());
        let elapsed = start.elapsed();
        let errors: Vec<_> = rows.iter().filter_map(|r| r.error.as_ref()).collect();
        let path = std::env::temp_dir().join(format!("cbn-acceptance-stress-{}.csv", std::process::id()));
        std::fs::write(&path, stress_csv(&rows)).map_err(err)?;
        let written = std::fs::read_to_string(&path).map_err(err)?.lines().count();
        let _ = std::fs::remove_file(&path);
        let buckets = bucket_medians(&rows);
        let medians: Vec<String> = buckets
            .iter()
            .map(|b| format!("{}: {}", b.label, b.median_seconds.map_or("-".into(), |m| format!("{m:.4}s"))))
            .collect();
        let trend = if medians_nondecreasing(&buckets) { "nondecreasing" } else { "DECREASING (reported deviation)" };
        verdict(
            errors.is_empty() && written == rows.len() + 1,
            format!(
                "{} of {} models completed, CSV {} lines, medians {} {} ({})",
                rows.len() - errors.len(),
                rows.len(),
                written,
                medians.join(", "),
                trend,
                secs(elapsed)
            ),
        )
    }
}

static HOLMES_GIVEN_WATSON: std::sync::LazyLock<MarginalSpec> =
    std::sync::LazyLock::new(|| MarginalSpec::new("HolmesWet", "T").given("WatsonWet", "T"));

fn main() {
    let mut suite = Suite { z3: common::solver(), opts: OptimizeOptions::default(), audited: Vec::new(), extra: Vec::new() };
    type Criterion = fn(&mut Suite) -> Check;
    let criteria: [(u8, &str, Criterion); 12] = [
        (1, "unconditional marginal polynomial", Suite::c1),
        (2, "conditional marginal N / D", Suite::c2),
        (3, "point values of the marginal", Suite::c3),
        (4, "may / must judgments", Suite::c4),
        (5, "sup of the conditional marginal", Suite::c5),
        (6, "composition sup / inf of diff", Suite::c6),
        (7, "tightened composition", Suite::c7),
        (8, "symbolic vs joint enumeration", Suite::c8),
        (9, "judgment laws", Suite::c9),
        (10, "satisfiability-check bounds", Suite::c10),
        (11, "case-study workflows", Suite::c11),
        (12, "stress harness", Suite::c12),
    ];
    let mut broken = Vec::new();
    for (id, title, run) in criteria {
        let start = Instant::now();
        match run(&mut suite) {
            Ok(line) => {
                let tag = match line.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::Fail => "FAIL",
                    Verdict::Skip => "SKIP",
                };
                println!("criterion {id:>2} {tag}  {title}: {}", line.text);
            }
            Err(e) => {
                println!("criterion {id:>2} ERROR {title}: {e} ({})", secs(start.elapsed()));
                broken.push(id);
            }
        }
    }
    if !broken.is_empty() {
        eprintln!("unexpected results in criteria {broken:?}");
        std::process::exit(1);
    }
}
