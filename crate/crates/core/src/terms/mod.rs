//! Expression algebra: terms, constraints and queries, their exact evaluation,
//! and canonical polynomial / rational-function normal forms.

pub mod eval;
pub mod expr;
pub mod parse;
pub mod poly;
mod print;
pub mod ratfn;

pub use eval::{evaluate, holds, violation, Assignment, EvalError};
pub use expr::{name, Constraint, Name, Query, Term, VarKind, VarRef};
pub use parse::{parse_constraint, parse_query, parse_term, ParseError};
pub use poly::{Monomial, Polynomial};
pub use ratfn::{simplify, to_rational_fn, RationalFn, ZeroDenominator};
