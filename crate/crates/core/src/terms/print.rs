//! Display impls producing text that [`super::parse`] reads back.

use std::fmt;

use num_traits::Signed;

use super::expr::{Constraint, Query, Term};
use crate::rational::{to_exact_decimal, Rational};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 4;

fn const_prec(c: &Rational) -> u8 {
    if c.is_negative() {
        UNARY
    } else {
        ATOM
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    let mag = c.abs();
    let sign = if c.is_negative() { "-" } else { "" };
    match to_exact_decimal(&mag) {
        Some(d) => write!(f, "{sign}{d}"),
        None => write!(f, "{sign}({}/{})", mag.numer(), mag.denom()),
    }
}

fn prec(t: &Term) -> u8 {
    match t {
        Term::Const(c) => const_prec(c),
        Term::Var(_) => ATOM,
        Term::Neg(_) => UNARY,
        Term::Mul(..) | Term::Div(..) => PRODUCT,
        Term::Add(..) | Term::Sub(..) => SUM,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, t: &Term, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write_const(f, c),
            Term::Var(v) => f.write_str(v),
            Term::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, prec(a) < UNARY)
            }
            Term::Add(a, b) | Term::Sub(a, b) => {
                write_child(f, a, prec(a) < SUM)?;
                f.write_str(if matches!(self, Term::Add(..)) { " + " } else { " - " })?;
                write_child(f, b, prec(b) <= SUM)
            }
            Term::Mul(a, b) | Term::Div(a, b) => {
                write_child(f, a, prec(a) < PRODUCT)?;
                f.write_str(if matches!(self, Term::Mul(..)) { "*" } else { "/" })?;
                write_child(f, b, prec(b) <= PRODUCT)
            }
        }
    }
}

const OR: u8 = 1;
const AND: u8 = 2;

fn cprec(c: &Constraint) -> u8 {
    match c {
        Constraint::Or(..) => OR,
        Constraint::And(..) => AND,
        _ => ATOM,
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cmp = |f: &mut fmt::Formatter<'_>, a: &Term, op: &str, b: &Term| write!(f, "{a} {op} {b}");
        match self {
            Constraint::True => f.write_str("true"),
            Constraint::Leq(a, b) => cmp(f, a, "<=", b),
            Constraint::Lt(a, b) => cmp(f, a, "<", b),
            Constraint::Eq(a, b) => cmp(f, a, "=", b),
            Constraint::Geq(a, b) => cmp(f, a, ">=", b),
            Constraint::Gt(a, b) => cmp(f, a, ">", b),
            Constraint::Not(c) => match c.as_ref() {
                Constraint::True => f.write_str("!true"),
                Constraint::Not(_) => write!(f, "!{c}"),
                _ => write!(f, "!({c})"),
            },
            Constraint::And(a, b) | Constraint::Or(a, b) => {
                let (p, op) = if matches!(self, Constraint::And(..)) { (AND, " & ") } else { (OR, " | ") };
                if cprec(a) < p {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                f.write_str(op)?;
                if cprec(b) <= p {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Base(c) => write!(f, "{c}"),
            Query::Exists(v, q) => write!(f, "exists {v}. {q}"),
            Query::Not(q) => write!(f, "!({q})"),
            Query::And(a, b) => write!(f, "({a}) & ({b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::{parse_constraint, parse_term};
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn prints_readably() {
        let t = parse_term("1 - 0.5*x").unwrap();
        assert_eq!(t.to_string(), "1 - 0.5*x");
        let t = parse_term("a - (b - c)").unwrap();
        assert_eq!(t.to_string(), "a - (b - c)");
        let t = Term::Const(ratio(-1, 3)) * Term::var("x");
        assert_eq!(t.to_string(), "-(1/3)*x");
        assert_eq!(parse_term(&t.to_string()).unwrap().fold_literals(), t);
    }

    #[test]
    fn constraint_round_trip() {
        for src in ["x <= 1 & (y > 2 | !(z = 3))", "!true", "(a < b | c < d) & e >= f", "!!(x < 1)"] {
            let c = parse_constraint(src).unwrap();
            let again = parse_constraint(&c.to_string()).unwrap();
            assert_eq!(c, again, "{src} -> {c}");
        }
    }
}
