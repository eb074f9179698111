use std::collections::BTreeMap;
use std::path::PathBuf;

use cbn::inference::{
    build_junction_tree, compile, enumerate_joint, query_joint, symbolic_marginal, InferenceError, InferenceOptions,
    DEFAULT_JOINT_CAP,
};
use cbn::model::{concretize, load_model, model_from_str, validate_well_formed, MarginalSpec};
use cbn::rational::{parse_decimal, ratio};
use cbn::terms::{name, parse_term, Assignment, Polynomial};

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn poly(src: &str) -> Polynomial {
    Polynomial::from_term(&parse_term(src).unwrap()).unwrap()
}

const HOLMES_WET: &str = "0.495*x*x + 0.5*x*(-0.95*x + 0.95) + 0.7*x*(-0.5*x + 1) + 1.0*(-0.5*x + 1)*(-0.05*x + 0.05)";
const WATSON_GIVEN_D: &str = "0.35*x*x + 0.025*x*(-0.95*x + 0.95) + 0.7*x*(-x*0.5 + 1) + 0.025*x*(-0.05*x + 0.05) \
                     + 0.05*(-0.95*x + 0.95)*(-x*0.5 + 1) + 0.05*(-x*0.5 + 1)*(-0.05*x + 0.05)";
const WATSON_GIVEN_N: &str =
    "0.3465*x*x + 0.025*x*(-0.95*x + 0.95) + 0.49*x*(-x*0.5 + 1) + 0.05*(-x*0.5 + 1)*(-0.05*x + 0.05)";

/// The constant network of the wet-grass example (Sprinkler On = 0.1, Rain T = 0.2).
const FIG1: &str = r#"{
  "nodes": [
    {"name": "Sprinkler", "states": ["On", "Off"], "table": {"|On": "0.1", "|Off": "0.9"}},
    {"name": "Rain", "states": ["T", "F"], "table": {"|T": "0.2", "|F": "0.8"}},
    {"name": "HolmesWet", "states": ["T", "F"], "parents": ["Sprinkler", "Rain"],
     "table": {"On,T|T": "0.99", "On,T|F": "0.01", "On,F|T": "0.95", "On,F|F": "0.05",
               "Off,T|T": "0.7", "Off,T|F": "0.3", "Off,F|T": "0.05", "Off,F|F": "0.95"}},
    {"name": "WatsonWet", "states": ["T", "F"], "parents": ["Rain"],
     "table": {"T|T": "0.7", "T|F": "0.3", "F|T": "0.05", "F|F": "0.95"}}
  ]
}"#;

#[test]
fn unconditional_marginal_matches_printed_polynomial() {
    let b = load_model(&models_dir().join("grass_wet.json")).unwrap();
    let def = &b.definitions()[&name("mp_H")];
    assert!(def.denominator.is_one());
    assert_eq!(def.numerator, poly(HOLMES_WET));
    assert_eq!(def.constraints.len(), 1);
}

#[test]
fn conditional_marginal_matches_printed_equation() {
    let b = load_model(&models_dir().join("grass_wet.json")).unwrap();
    let def = &b.definitions()[&name("mp_W")];
    assert_eq!(def.numerator, poly(WATSON_GIVEN_N));
    assert_eq!(def.denominator, poly(WATSON_GIVEN_D));
    assert_eq!(def.constraints.len(), 2, "mp*D = N and D > 0");
    assert!(validate_well_formed(&b).is_empty());
}

#[test]
fn constant_network_oracle() {
    let b = model_from_str(FIG1, InferenceOptions::default()).unwrap();
    let c = concretize(&b, &Assignment::new()).unwrap();
    let joint = enumerate_joint(&c, DEFAULT_JOINT_CAP).unwrap();
    assert_eq!(joint.entries.len(), 16);
    let total: cbn::Rational = joint.entries.iter().map(|(_, p)| p.clone()).sum();
    assert_eq!(total, ratio(1, 1));
    let h = MarginalSpec::new("HolmesWet", "T");
    assert_eq!(query_joint(&joint, &h).unwrap(), parse_decimal("0.2578").unwrap());
    let cond = MarginalSpec::new("HolmesWet", "T").given("Sprinkler", "Off").given("Rain", "F");
    assert_eq!(query_joint(&joint, &cond).unwrap(), parse_decimal("0.05").unwrap());
    // symbolic marginal of a constant network is a constant equal to the oracle
    let def = symbolic_marginal(&b, &h, &InferenceOptions::default()).unwrap();
    assert_eq!(def.numerator.as_constant(), Some(parse_decimal("0.2578").unwrap()));
    let w = MarginalSpec::new("HolmesWet", "T").given("WatsonWet", "T");
    let def = symbolic_marginal(&b, &w, &InferenceOptions::default()).unwrap();
    assert!(def.denominator.is_one(), "constant denominators are folded");
    assert_eq!(def.numerator.as_constant().unwrap(), query_joint(&joint, &w).unwrap());
}

#[test]
fn single_node_and_deterministic_chain() {
    let one = r#"{"nodes": [{"name": "n", "states": ["a", "b"], "table": {"|a": "0.4", "|b": "0.6"}}]}"#;
    let b = model_from_str(one, InferenceOptions::default()).unwrap();
    let joint = enumerate_joint(&concretize(&b, &Assignment::new()).unwrap(), DEFAULT_JOINT_CAP).unwrap();
    let probs: Vec<_> = joint.entries.iter().map(|(_, p)| p.clone()).collect();
    assert_eq!(probs, vec![ratio(2, 5), ratio(3, 5)]);

    let chain = r#"{"nodes": [
        {"name": "a", "states": ["t", "f"], "table": {"|t": "1", "|f": "0"}},
        {"name": "b", "states": ["t", "f"], "parents": ["a"], "table": {"t|t": "0", "t|f": "1", "f|t": "1", "f|f": "0"}}
    ]}"#;
    let b = model_from_str(chain, InferenceOptions::default()).unwrap();
    let joint = enumerate_joint(&concretize(&b, &Assignment::new()).unwrap(), DEFAULT_JOINT_CAP).unwrap();
    let nonzero: Vec<_> = joint.entries.iter().filter(|(_, p)| *p != ratio(0, 1)).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0].1, ratio(1, 1));
}

#[test]
fn junction_tree_of_grass_wet_is_well_formed() {
    let b = load_model(&models_dir().join("grass_wet.json")).unwrap();
    let c = compile(&b, &InferenceOptions::default()).unwrap();
    assert!(c.tree.has_running_intersection());
    // normalization: every clique belief sums to 1 for this sound model
    for belief in c.propagate(&[]) {
        let total = belief.values().iter().fold(Polynomial::zero(), |acc, v| &acc + v);
        assert!(total.is_one(), "{total}");
    }
    let rebuilt = build_junction_tree(c.triangulation.cliques.clone());
    assert_eq!(rebuilt, c.tree);
}

#[test]
fn width_cap_is_enforced() {
    let b = load_model(&models_dir().join("grass_wet.json")).unwrap();
    let opts = InferenceOptions { width_cap: 4, ..InferenceOptions::default() };
    let err = compile(&b, &opts).unwrap_err();
    assert!(matches!(err, InferenceError::WidthExceeded { size: 8, .. }), "{err}");
}

#[test]
fn denominator_guard_can_be_disabled() {
    let opts = InferenceOptions { denominator_guard: false, ..InferenceOptions::default() };
    let b = cbn::model::load_model_with(&models_dir().join("grass_wet.json"), opts).unwrap();
    assert_eq!(b.definitions()[&name("mp_W")].constraints.len(), 1);
}

#[test]
fn installing_twice_gives_equal_definitions() {
    let b = load_model(&models_dir().join("grass_wet.json")).unwrap();
    let spec = b.marginals()[&name("mp_W")].clone();
    let b2 = b.install_marginal(&spec, "mp_W_again").unwrap();
    assert!(validate_well_formed(&b2).is_empty());
    let defs = b2.definitions();
    assert_eq!(defs[&name("mp_W")].numerator, defs[&name("mp_W_again")].numerator);
    assert!(b2.install_marginal(&spec, "x").is_err());
    let mut bad = BTreeMap::new();
    bad.insert(name("Nope"), name("T"));
    let spec = MarginalSpec { node: name("HolmesWet"), state: name("T"), evidence: bad };
    assert!(b.install_marginal(&spec, "mp_bad").is_err());
}
