//! Constrained Bayesian networks: Bayesian networks whose probability tables hold
//! symbolic terms governed by real-arithmetic constraints.
//!
//! The crate provides exact symbolic inference (a division-free junction tree over
//! polynomial potentials), may/must judgments decided by an external SMT solver,
//! interval optimization of arbitrary terms by bisection over satisfiability checks,
//! constrained model composition and symbolic sensitivity values.

pub mod compose;
pub mod inference;
pub mod logic;
pub mod model;
pub mod optimize;
pub mod random;
pub mod rational;
pub mod sensitivity;
pub mod terms;

pub use rational::Rational;
