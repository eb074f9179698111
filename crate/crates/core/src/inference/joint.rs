//! Brute-force joint distribution of a concrete network: the exact testing oracle.

use num_traits::{One, Zero};

use super::factor::increment;
use super::InferenceError;
use crate::model::{ConcreteBN, MarginalSpec};
use crate::rational::Rational;
use crate::terms::Name;

/// Full joint distribution: one probability per state tuple (state indices in
/// node order), tuples enumerated with the first node most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Joint {
    pub names: Vec<Name>,
    pub states: Vec<Vec<Name>>,
    pub entries: Vec<(Vec<usize>, Rational)>,
}

pub const DEFAULT_JOINT_CAP: usize = 1_000_000;

pub fn enumerate_joint(b: &ConcreteBN, cap: usize) -> Result<Joint, InferenceError> {
    let cards: Vec<usize> = b.nodes().iter().map(|n| n.states.len()).collect();
    let size = cards.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).unwrap_or(usize::MAX);
    if size > cap {
        return Err(InferenceError::JointCap { size, cap });
    }
    let mut entries = Vec::with_capacity(size);
    let mut idx = vec![0usize; cards.len()];
    for _ in 0..size {
        let mut p = Rational::one();
        for &i in b.topological_order() {
            let e = b.entry(i, &idx);
            if e.is_zero() {
                p = Rational::zero();
                break;
            }
            p *= e;
        }
        entries.push((idx.clone(), p));
        increment(&mut idx, &cards);
    }
    Ok(Joint {
        names: b.nodes().iter().map(|n| n.name.clone()).collect(),
        states: b.nodes().iter().map(|n| n.states.clone()).collect(),
        entries,
    })
}

impl Joint {
    fn locate(&self, node: &Name, state: &Name) -> Result<(usize, usize), InferenceError> {
        let i = self.names.iter().position(|n| n == node).ok_or_else(|| InferenceError::UnknownNode(node.clone()))?;
        let s = self.states[i]
            .iter()
            .position(|x| x == state)
            .ok_or_else(|| InferenceError::UnknownState { node: node.clone(), state: state.clone() })?;
        Ok((i, s))
    }
}

/// `p(target | evidence)` by summation over the joint.
pub fn query_joint(joint: &Joint, spec: &MarginalSpec) -> Result<Rational, InferenceError> {
    if spec.evidence.contains_key(&spec.node) {
        return Err(InferenceError::TargetInEvidence(spec.node.clone()));
    }
    let (ti, ts) = joint.locate(&spec.node, &spec.state)?;
    let ev = spec.evidence.iter().map(|(n, s)| joint.locate(n, s)).collect::<Result<Vec<_>, _>>()?;
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for (idx, p) in &joint.entries {
        if ev.iter().all(|&(i, s)| idx[i] == s) {
            den += p;
            if idx[ti] == ts {
                num += p;
            }
        }
    }
    if spec.evidence.is_empty() {
        return Ok(num);
    }
    if den.is_zero() {
        return Err(InferenceError::ZeroEvidence);
    }
    Ok(num / den)
}
