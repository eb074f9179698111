//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;

use num_traits::{One, Signed, Zero};

use super::eval::{Assignment, EvalError};
use super::expr::{Name, Term};
use crate::rational::Rational;

/// Power product `x1^e1 * ... * xk^ek`, variables sorted by name, all exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Name, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Name) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Name, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: &str) -> u32 {
        self.0.iter().find(|(n, _)| n.as_ref() == v).map_or(0, |(_, e)| *e)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn evaluate(&self, a: &Assignment) -> Result<Rational, EvalError> {
        let mut acc = Rational::one();
        for (v, e) in &self.0 {
            let x = a.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?;
            acc *= num_traits::pow(x.clone(), *e as usize);
        }
        Ok(acc)
    }
}

/// Graded order: total degree first, then larger exponents on lexicographically earlier names.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (a, b) = (&self.0, &other.0);
            for k in 0..a.len().min(b.len()) {
                match a[k].0.cmp(&b[k].0) {
                    // `a` has a positive exponent on an earlier variable
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match a[k].1.cmp(&b[k].1) {
                        Ordering::Equal => {}
                        ord => return ord,
                    },
                }
            }
            a.len().cmp(&b.len()).reverse()
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical sparse polynomial: no zero coefficients are stored; the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: Name) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::var(v), Rational::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(items: I) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in items {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value of a constant polynomial (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| v.clone())).collect()
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        (0..e).fold(Polynomial::one(), |acc, _| &acc * self)
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<Rational, EvalError> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            acc += m.evaluate(a)? * c;
        }
        Ok(acc)
    }

    pub fn rename(&self, map: &BTreeMap<Name, Name>) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| {
            let renamed = m.0.iter().fold(Monomial::one(), |acc, (v, e)| {
                let v = map.get(v).cloned().unwrap_or_else(|| v.clone());
                acc.mul(&Monomial(vec![(v, *e)]))
            });
            (renamed, c.clone())
        }))
    }

    /// Converts a division-free term. Returns `None` if the term contains `Div`.
    pub fn from_term(t: &Term) -> Option<Polynomial> {
        Some(match t {
            Term::Const(c) => Polynomial::constant(c.clone()),
            Term::Var(v) => Polynomial::var(v.clone()),
            Term::Add(a, b) => &Polynomial::from_term(a)? + &Polynomial::from_term(b)?,
            Term::Sub(a, b) => &Polynomial::from_term(a)? - &Polynomial::from_term(b)?,
            Term::Mul(a, b) => &Polynomial::from_term(a)? * &Polynomial::from_term(b)?,
            Term::Neg(a) => -&Polynomial::from_term(a)?,
            Term::Div(..) => return None,
        })
    }

    /// Sum of coefficient-times-power-product terms in descending order; negative
    /// coefficients after the first term become subtractions.
    pub fn to_term(&self) -> Term {
        let mut acc: Option<Term> = None;
        for (m, c) in self.terms() {
            let negative = c.is_negative();
            let mag = if acc.is_some() && negative { -c.clone() } else { c.clone() };
            let vars = m.0.iter().flat_map(|(v, e)| std::iter::repeat_n(v, *e as usize));
            let piece = if m.is_one() || !mag.is_one() {
                vars.fold(Term::Const(mag), |acc, v| acc * Term::Var(v.clone()))
            } else {
                vars.map(|v| Term::Var(v.clone())).reduce(|a, b| a * b).expect("non-constant monomial")
            };
            acc = Some(match acc {
                None => piece,
                Some(a) if negative => a - piece,
                Some(a) => a + piece,
            });
        }
        acc.unwrap_or_else(|| Term::Const(Rational::zero()))
    }
}

impl ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl ops::AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}
