use std::collections::{BTreeMap, BTreeSet};
use std::ops;
use std::sync::Arc;

use crate::rational::Rational;

/// Interned-ish variable name; cheap to clone.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Which variable set a name belongs to. Probability-table variables live in `X_x`,
/// marginal variables (defined by generated equations) in `X_mp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    #[serde(rename = "x")]
    Prob,
    #[serde(rename = "mp")]
    Marginal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub name: Name,
    pub kind: VarKind,
}

/// Real-valued term. `Neg`, `Sub` and `Div` are surface sugar over constants,
/// variables, `Add` and `Mul`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Rational),
    Var(Name),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Div(Box<Term>, Box<Term>),
}

impl Term {
    pub fn constant(c: Rational) -> Term {
        Term::Const(c)
    }

    pub fn int(n: i64) -> Term {
        Term::Const(crate::rational::int(n))
    }

    pub fn var(n: &str) -> Term {
        Term::Var(name(n))
    }

    /// True iff the term contains no division.
    pub fn is_core(&self) -> bool {
        match self {
            Term::Const(_) | Term::Var(_) => true,
            Term::Neg(a) => a.is_core(),
            Term::Add(a, b) | Term::Mul(a, b) | Term::Sub(a, b) => a.is_core() && b.is_core(),
            Term::Div(..) => false,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Neg(a) => a.collect_vars(out),
            Term::Add(a, b) | Term::Mul(a, b) | Term::Sub(a, b) | Term::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Rewrites `Neg` and `Sub` into `Add`/`Mul` by `-1`. Division is left in place.
    pub fn desugar(&self) -> Term {
        let minus_one = || Term::int(-1);
        match self {
            Term::Const(_) | Term::Var(_) => self.clone(),
            Term::Neg(a) => Term::Mul(Box::new(minus_one()), Box::new(a.desugar())),
            Term::Sub(a, b) => Term::Add(
                Box::new(a.desugar()),
                Box::new(Term::Mul(Box::new(minus_one()), Box::new(b.desugar()))),
            ),
            Term::Add(a, b) => Term::Add(Box::new(a.desugar()), Box::new(b.desugar())),
            Term::Mul(a, b) => Term::Mul(Box::new(a.desugar()), Box::new(b.desugar())),
            Term::Div(a, b) => Term::Div(Box::new(a.desugar()), Box::new(b.desugar())),
        }
    }

    /// Folds literal-only negations and quotients (`-3`, `1/3`) into constants, bottom-up.
    /// This is the canonical form the printer round-trips through.
    pub fn fold_literals(&self) -> Term {
        match self {
            Term::Const(_) | Term::Var(_) => self.clone(),
            Term::Neg(a) => match a.fold_literals() {
                Term::Const(c) => Term::Const(-c),
                other => Term::Neg(Box::new(other)),
            },
            Term::Div(a, b) => match (a.fold_literals(), b.fold_literals()) {
                (Term::Const(x), Term::Const(y)) if !num_traits::Zero::is_zero(&y) => Term::Const(x / y),
                (x, y) => Term::Div(Box::new(x), Box::new(y)),
            },
            Term::Add(a, b) => Term::Add(Box::new(a.fold_literals()), Box::new(b.fold_literals())),
            Term::Mul(a, b) => Term::Mul(Box::new(a.fold_literals()), Box::new(b.fold_literals())),
            Term::Sub(a, b) => Term::Sub(Box::new(a.fold_literals()), Box::new(b.fold_literals())),
        }
    }

    /// Replaces variables by terms; unmapped variables are kept.
    pub fn substitute(&self, map: &BTreeMap<Name, Term>) -> Term {
        self.map_vars(&|v| map.get(v).cloned().unwrap_or_else(|| Term::Var(v.clone())))
    }

    pub fn rename(&self, map: &BTreeMap<Name, Name>) -> Term {
        self.map_vars(&|v| Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())))
    }

    fn map_vars(&self, f: &dyn Fn(&Name) -> Term) -> Term {
        let bin = |a: &Term, b: &Term| (Box::new(a.map_vars(f)), Box::new(b.map_vars(f)));
        match self {
            Term::Const(_) => self.clone(),
            Term::Var(v) => f(v),
            Term::Neg(a) => Term::Neg(Box::new(a.map_vars(f))),
            Term::Add(a, b) => {
                let (a, b) = bin(a, b);
                Term::Add(a, b)
            }
            Term::Mul(a, b) => {
                let (a, b) = bin(a, b);
                Term::Mul(a, b)
            }
            Term::Sub(a, b) => {
                let (a, b) = bin(a, b);
                Term::Sub(a, b)
            }
            Term::Div(a, b) => {
                let (a, b) = bin(a, b);
                Term::Div(a, b)
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 1,
            Term::Neg(a) => 1 + a.size(),
            Term::Add(a, b) | Term::Mul(a, b) | Term::Sub(a, b) | Term::Div(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl From<Rational> for Term {
    fn from(c: Rational) -> Self {
        Term::Const(c)
    }
}

macro_rules! term_binop {
    ($tr:ident, $method:ident, $variant:ident) => {
        impl ops::$tr for Term {
            type Output = Term;
            fn $method(self, rhs: Term) -> Term {
                Term::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}
term_binop!(Add, add, Add);
term_binop!(Mul, mul, Mul);
term_binop!(Sub, sub, Sub);
term_binop!(Div, div, Div);

impl ops::Neg for Term {
    type Output = Term;
    fn neg(self) -> Term {
        Term::Neg(Box::new(self))
    }
}

/// Quantifier-free constraint. `Or`, `Eq`, `Geq` and `Gt` are derived forms;
/// [`Constraint::to_primitive`] expands them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    True,
    Leq(Term, Term),
    Lt(Term, Term),
    Not(Box<Constraint>),
    And(Box<Constraint>, Box<Constraint>),
    Or(Box<Constraint>, Box<Constraint>),
    Eq(Term, Term),
    Geq(Term, Term),
    Gt(Term, Term),
}

impl Constraint {
    pub fn and(self, other: Constraint) -> Constraint {
        Constraint::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Constraint) -> Constraint {
        Constraint::Or(Box::new(self), Box::new(other))
    }

    pub fn negate(self) -> Constraint {
        Constraint::Not(Box::new(self))
    }

    pub fn falsum() -> Constraint {
        Constraint::True.negate()
    }

    /// Left-nested conjunction; `true` for an empty iterator.
    pub fn all<I: IntoIterator<Item = Constraint>>(items: I) -> Constraint {
        items.into_iter().reduce(Constraint::and).unwrap_or(Constraint::True)
    }

    /// Left-nested disjunction; `false` for an empty iterator.
    pub fn any<I: IntoIterator<Item = Constraint>>(items: I) -> Constraint {
        items.into_iter().reduce(Constraint::or).unwrap_or_else(Constraint::falsum)
    }

    /// Top-level conjuncts, flattening nested `And`.
    pub fn conjuncts(&self) -> Vec<&Constraint> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a Constraint, out: &mut Vec<&'a Constraint>) {
            match c {
                Constraint::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Constraint::True => {}
            Constraint::Leq(a, b)
            | Constraint::Lt(a, b)
            | Constraint::Eq(a, b)
            | Constraint::Geq(a, b)
            | Constraint::Gt(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Constraint::Not(c) => c.collect_vars(out),
            Constraint::And(a, b) | Constraint::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Expands derived operators into `true`, `<=`, `<`, `!` and `&`, and desugars every term.
    pub fn to_primitive(&self) -> Constraint {
        use Constraint as C;
        match self {
            C::True => C::True,
            C::Leq(a, b) => C::Leq(a.desugar(), b.desugar()),
            C::Lt(a, b) => C::Lt(a.desugar(), b.desugar()),
            C::Geq(a, b) => C::Leq(b.desugar(), a.desugar()),
            C::Gt(a, b) => C::Lt(b.desugar(), a.desugar()),
            C::Eq(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                C::Leq(a.clone(), b.clone()).and(C::Leq(b, a))
            }
            C::Not(c) => c.to_primitive().negate(),
            C::And(a, b) => a.to_primitive().and(b.to_primitive()),
            C::Or(a, b) => a.to_primitive().negate().and(b.to_primitive().negate()).negate(),
        }
    }

    pub fn is_primitive(&self) -> bool {
        use Constraint as C;
        match self {
            C::True => true,
            C::Leq(a, b) | C::Lt(a, b) => is_desugared(a) && is_desugared(b),
            C::Not(c) => c.is_primitive(),
            C::And(a, b) => a.is_primitive() && b.is_primitive(),
            C::Or(..) | C::Eq(..) | C::Geq(..) | C::Gt(..) => false,
        }
    }

    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Constraint {
        use Constraint as C;
        match self {
            C::True => C::True,
            C::Leq(a, b) => C::Leq(f(a), f(b)),
            C::Lt(a, b) => C::Lt(f(a), f(b)),
            C::Eq(a, b) => C::Eq(f(a), f(b)),
            C::Geq(a, b) => C::Geq(f(a), f(b)),
            C::Gt(a, b) => C::Gt(f(a), f(b)),
            C::Not(c) => c.map_terms(f).negate(),
            C::And(a, b) => a.map_terms(f).and(b.map_terms(f)),
            C::Or(a, b) => a.map_terms(f).or(b.map_terms(f)),
        }
    }

    pub fn rename(&self, map: &BTreeMap<Name, Name>) -> Constraint {
        self.map_terms(&|t| t.rename(map))
    }

    pub fn substitute(&self, map: &BTreeMap<Name, Term>) -> Constraint {
        self.map_terms(&|t| t.substitute(map))
    }

    pub fn fold_literals(&self) -> Constraint {
        self.map_terms(&Term::fold_literals)
    }

    pub fn size(&self) -> usize {
        use Constraint as C;
        match self {
            C::True => 1,
            C::Leq(a, b) | C::Lt(a, b) | C::Eq(a, b) | C::Geq(a, b) | C::Gt(a, b) => 1 + a.size() + b.size(),
            C::Not(c) => 1 + c.size(),
            C::And(a, b) | C::Or(a, b) => 1 + a.size() + b.size(),
        }
    }
}

fn is_desugared(t: &Term) -> bool {
    match t {
        Term::Const(_) | Term::Var(_) => true,
        Term::Neg(_) | Term::Sub(..) => false,
        Term::Add(a, b) | Term::Mul(a, b) | Term::Div(a, b) => is_desugared(a) && is_desugared(b),
    }
}

/// First-order query over constraints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Query {
    Base(Constraint),
    Exists(Name, Box<Query>),
    Not(Box<Query>),
    And(Box<Query>, Box<Query>),
}

impl Query {
    /// Existential closure of `matrix` over `vars`, outermost first.
    pub fn exists_closure(vars: &[Name], matrix: Constraint) -> Query {
        vars.iter()
            .rev()
            .fold(Query::Base(matrix), |q, v| Query::Exists(v.clone(), Box::new(q)))
    }

    /// Splits a prenex-existential query into its bound variables and matrix.
    /// Returns `None` for any other shape.
    pub fn as_prenex_existential(&self) -> Option<(Vec<Name>, &Constraint)> {
        let mut vars = Vec::new();
        let mut q = self;
        loop {
            match q {
                Query::Exists(v, body) => {
                    vars.push(v.clone());
                    q = body;
                }
                Query::Base(c) => return Some((vars, c)),
                _ => return None,
            }
        }
    }

    /// Collapses quantifier-free sub-queries into a single `Base`.
    pub fn collapse(self) -> Query {
        match self {
            Query::Not(q) => match q.collapse() {
                Query::Base(c) => Query::Base(c.negate()),
                other => Query::Not(Box::new(other)),
            },
            Query::And(a, b) => match (a.collapse(), b.collapse()) {
                (Query::Base(x), Query::Base(y)) => Query::Base(x.and(y)),
                (x, y) => Query::And(Box::new(x), Box::new(y)),
            },
            Query::Exists(v, q) => Query::Exists(v, Box::new(q.collapse())),
            base => base,
        }
    }
}
