//! End-to-end runs of the `cbn` binary: exit codes, report envelope and golden
//! reports. Set `CBN_UPDATE_GOLDEN=1` to rewrite the golden files.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Runs `cbn` from the workspace root so report paths are stable.
fn cbn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbn")).current_dir(root()).args(args).output().expect("cbn runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout is not a report ({e}): {}\n{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

fn have_solver() -> bool {
    let found = std::env::var_os("CBN_SOLVER").is_some()
        || Command::new("z3").arg("-version").output().map(|o| o.status.success()).unwrap_or(false);
    if !found {
        eprintln!("skipped: no SMT solver available");
    }
    found
}

fn check_golden(name: &str, actual: &[u8]) {
    let path = golden_dir().join(name);
    if std::env::var_os("CBN_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()));
    assert!(
        expected == actual,
        "{} differs from golden output:\n{}",
        name,
        String::from_utf8_lossy(actual)
    );
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cbn-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn keys(v: &Value) -> Vec<&str> {
    v.as_object().unwrap().keys().map(String::as_str).collect()
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(code(&cbn(&["bogus"])), 3);
    assert_eq!(code(&cbn(&["judge", "models/grass_wet.json", "--mode", "maybe", "--phi", "x > 0"])), 3);
    assert_eq!(code(&cbn(&["marginal", "models/no_such_model.json", "--mp", "mp_H"])), 3);
    assert_eq!(code(&cbn(&["marginal", "models/grass_wet.json", "--mp", "mp_nope"])), 3);
    assert_eq!(code(&cbn(&["sup", "models/grass_wet.json", "--term", "mp_H", "--delta", "0"])), 3);
    assert_eq!(code(&cbn(&["sup", "models/grass_wet.json", "--term", "mp_H +", "--delta", "1e-3"])), 3);
    assert_eq!(code(&cbn(&["gen-random", "--nodes", "0", "--vars", "1"])), 3);
    assert_eq!(code(&cbn(&["--help"])), 0);
}

#[test]
fn missing_solver_is_unknown() {
    let o = cbn(&["--solver", "/nonexistent/solver", "judge", "models/grass_wet.json", "--mode", "may", "--phi", "mp_H < 0.3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
}

#[test]
fn marginal_reports_are_golden() {
    let h = cbn(&["marginal", "models/grass_wet.json", "--mp", "mp_H"]);
    assert_eq!(code(&h), 0);
    assert_eq!(report(&h)["outcome"]["numerator"], "-0.305*x*x + 1.1*x + 0.05");
    check_golden("marginal_mp_H.json", &h.stdout);

    let w = cbn(&["marginal", "models/grass_wet.json", "--mp", "mp_W"]);
    assert_eq!(code(&w), 0);
    check_golden("marginal_mp_W.json", &w.stdout);

    // the ad-hoc query form gives the same definition as the declared marginal
    let adhoc = cbn(&["marginal", "models/grass_wet.json", "--node", "HolmesWet", "--state", "T", "--given", "WatsonWet=T"]);
    assert_eq!(code(&adhoc), 0);
    let (a, d) = (report(&adhoc), report(&w));
    assert_eq!(a["outcome"]["numerator"], d["outcome"]["numerator"]);
    assert_eq!(a["outcome"]["denominator"], d["outcome"]["denominator"]);
}

#[test]
fn report_envelope_has_stable_key_order() {
    let o = cbn(&["marginal", "models/grass_wet.json", "--mp", "mp_H"]);
    assert_eq!(keys(&report(&o)), ["command", "model_hash", "inputs", "outcome", "stats", "warnings"]);
    if !have_solver() {
        return;
    }
    let j = cbn(&["judge", "models/grass_wet.json", "--mode", "may", "--phi", "mp_H < 0.3"]);
    assert_eq!(code(&j), 0);
    let r = report(&j);
    assert_eq!(keys(&r), ["command", "model_hash", "inputs", "outcome", "witness", "stats", "warnings"]);
    assert!(r["witness"]["residual"].is_string());
}

#[test]
fn validate_grass_wet_is_golden() {
    if !have_solver() {
        return;
    }
    let o = cbn(&["--no-timings", "validate", "models/grass_wet.json"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["outcome"]["well_formed"], true);
    assert_eq!(r["outcome"]["sound"], "sound");
    assert_eq!(r["outcome"]["consistent"], "sat");
    check_golden("validate_grass_wet.json", &o.stdout);
}

#[test]
fn validate_flags_broken_models() {
    if !have_solver() {
        return;
    }
    let o = cbn(&["validate", "crates/cli/tests/fixtures/contradictory.json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["outcome"]["consistent"], "unsat");

    let o = cbn(&["validate", "crates/cli/tests/fixtures/mp_redefined.json"]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(r["outcome"]["well_formed"], false);
    assert_eq!(r["outcome"]["violations"][0]["message"], "1(b): multiple definitions");
}

#[test]
fn judgments_map_to_exit_codes() {
    if !have_solver() {
        return;
    }
    let may = cbn(&["judge", "models/grass_wet.json", "--mode", "may", "--phi", "mp_H < 0.3"]);
    assert_eq!(code(&may), 0);
    assert_eq!(report(&may)["outcome"]["judgment"], "holds");

    let must = cbn(&["judge", "models/grass_wet.json", "--mode", "must", "--phi", "mp_H < 0.3"]);
    assert_eq!(code(&must), 1);
    assert_eq!(report(&must)["outcome"]["judgment"], "fails");

    let vacuous = cbn(&["judge", "crates/cli/tests/fixtures/contradictory.json", "--mode", "must", "--phi", "x > 2"]);
    assert_eq!(code(&vacuous), 0);
    let r = report(&vacuous);
    assert_eq!(r["outcome"]["vacuous"], true);
    assert_eq!(r["warnings"][0], "vacuous: model inconsistent");
}

#[test]
fn sup_and_inf_report_brackets() {
    if !have_solver() {
        return;
    }
    let o = cbn(&["--no-timings", "sup", "models/grass_wet.json", "--term", "mp_H", "--delta", "1e-6"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["outcome"]["kind"], "interval");
    let low: f64 = r["outcome"]["low"]["approx"].as_str().unwrap().parse().unwrap();
    let high: f64 = r["outcome"]["high"]["approx"].as_str().unwrap().parse().unwrap();
    assert!(low <= 0.35255 && 0.35255 <= high);
    assert!(r["stats"]["sat_checks"].as_u64().unwrap() <= r["stats"]["derived_bound"].as_u64().unwrap());
    assert!(r["stats"].get("wall_time_ms").is_none());

    let o = cbn(&["inf", "models/grass_wet.json", "--term", "mp_H", "--delta", "1e-6"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    let low: f64 = r["outcome"]["low"]["approx"].as_str().unwrap().parse().unwrap();
    let high: f64 = r["outcome"]["high"]["approx"].as_str().unwrap().parse().unwrap();
    assert!(low <= 0.15695 && 0.15695 <= high);
    assert!(r["stats"]["wall_time_ms"].is_u64());

    let o = cbn(&["sup", "crates/cli/tests/fixtures/contradictory.json", "--term", "x", "--delta", "1e-3"]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["outcome"]["kind"], "inconsistent");
}

#[test]
fn reports_are_byte_reproducible() {
    if !have_solver() {
        return;
    }
    let args = ["--no-timings", "--seed", "7", "sup", "models/grass_wet.json", "--term", "mp_W", "--delta", "1e-4"];
    let (a, b) = (cbn(&args), cbn(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn compose_report_is_golden() {
    if !have_solver() {
        return;
    }
    let out = tmp("composed.json");
    let o = cbn(&[
        "compose",
        "--left",
        "models/grass_wet.json",
        "--right",
        "models/grass_wet_rain3.json",
        "--right-suffix",
        "2",
        "--link",
        "2*z = x",
        "--link",
        "diff = mp_W - mp_Wp",
    ]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["outcome"]["sound"], "sound");
    assert_eq!(r["outcome"]["renames"]["right_nodes"]["Rain"], "Rain2");
    check_golden("compose_grass_wet.json", &o.stdout);

    // the written model loads back and is what the hash names
    let w = cbn(&[
        "compose",
        "--left",
        "models/grass_wet.json",
        "--right",
        "models/grass_wet_rain3.json",
        "--right-suffix",
        "2",
        "--link",
        "2*z = x",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&w), 0);
    let text = std::fs::read(&out).unwrap();
    let v = cbn(&["validate", out.to_str().unwrap()]);
    assert_eq!(code(&v), 0);
    assert_eq!(report(&v)["model_hash"], report(&w)["model_hash"]);
    assert!(!text.is_empty());

    let clash = cbn(&["compose", "--left", "models/grass_wet.json", "--right", "models/grass_wet_rain3.json"]);
    assert_eq!(code(&clash), 1);
    let redefine = cbn(&[
        "compose",
        "--left",
        "models/grass_wet.json",
        "--right",
        "models/grass_wet_rain3.json",
        "--right-suffix",
        "2",
        "--link",
        "mp_H = 0.5",
    ]);
    assert_eq!(code(&redefine), 1);
    assert!(String::from_utf8_lossy(&redefine.stderr).contains("link constraint redefines marginal"));
}

#[test]
fn sensitivity_writes_closed_form_and_samples() {
    let csv = tmp("s.csv");
    let o = cbn(&[
        "sensitivity",
        "models/tamper_toy.json",
        "--hypothesis",
        "AuthCapability=Low",
        "--evidence",
        "FindingTamper=Yes",
        "--csv",
        csv.to_str().unwrap(),
        "--to",
        "0.6666",
        "--steps",
        "10",
    ]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert!(r["outcome"]["closed_form"].as_str().unwrap().starts_with("s = "));
    assert_eq!(r["outcome"]["components"]["PO"], "0.2");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,s"));
    assert_eq!(lines.count(), 11);

    let same = cbn(&["sensitivity", "models/tamper_toy.json", "--hypothesis", "AuthCapability=Low", "--evidence", "AuthCapability=High"]);
    assert_eq!(code(&same), 3);
}

#[test]
fn gen_random_is_golden_and_validates() {
    let out = tmp("random.json");
    let o = cbn(&["--seed", "1", "gen-random", "--nodes", "5", "--vars", "2", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    check_golden("random_seed1_n5_v2.json", &std::fs::read(&out).unwrap());
    let again = cbn(&["--seed", "1", "gen-random", "--nodes", "5", "--vars", "2"]);
    assert_eq!(report(&again)["model_hash"], report(&o)["model_hash"]);
    if !have_solver() {
        return;
    }
    assert_eq!(code(&cbn(&["validate", out.to_str().unwrap()])), 0);
}

#[test]
fn stress_emits_csv() {
    let csv = tmp("stress.csv");
    let o = cbn(&["--no-timings", "--seed", "3", "stress", "--count", "6", "--jobs", "2", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["outcome"]["completed"], 6);
    assert!(r["outcome"].get("medians_nondecreasing").is_none());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("nodes,x_vars,total_states,marginal_len,seconds"));
    assert_eq!(text.lines().count(), 7);
    let report_file = tmp("stress_report.json");
    let again = cbn(&[
        "--no-timings",
        "--seed",
        "3",
        "--report",
        report_file.to_str().unwrap(),
        "stress",
        "--count",
        "6",
        "--jobs",
        "3",
    ]);
    // timings excluded, so the job count only changes the recorded input
    let mut a = report(&again);
    a["inputs"]["jobs"] = 2.into();
    a["inputs"]["csv"] = r["inputs"]["csv"].clone();
    assert_eq!(a, r);
    assert_eq!(std::fs::read(&report_file).unwrap(), again.stdout);
}
