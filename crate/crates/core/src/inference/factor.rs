//! Dense tables of polynomials indexed by joint states of a sorted variable scope.

use crate::terms::Polynomial;

/// A potential over `vars` (node indices, strictly increasing) with row-major
/// layout: the first variable is most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    vars: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<Polynomial>,
}

impl Factor {
    pub fn unit() -> Factor {
        Factor { vars: Vec::new(), cards: Vec::new(), values: vec![Polynomial::one()] }
    }

    /// All-ones potential over `vars`.
    pub fn ones(vars: Vec<usize>, cards: Vec<usize>) -> Factor {
        let size = cards.iter().product();
        Factor { vars, cards, values: vec![Polynomial::one(); size] }
    }

    /// Builds a factor from values laid out over `vars` in an arbitrary order; the
    /// result is re-indexed over the sorted scope.
    pub fn from_unsorted(vars: &[usize], cards: &[usize], values: Vec<Polynomial>) -> Factor {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by_key(|&k| vars[k]);
        let sorted_vars: Vec<usize> = order.iter().map(|&k| vars[k]).collect();
        let sorted_cards: Vec<usize> = order.iter().map(|&k| cards[k]).collect();
        if order.iter().enumerate().all(|(i, &k)| i == k) {
            return Factor { vars: sorted_vars, cards: sorted_cards, values };
        }
        let src_strides = strides(cards);
        let mut out = vec![Polynomial::zero(); values.len()];
        let mut idx = vec![0usize; vars.len()];
        for slot in out.iter_mut() {
            let src: usize = order.iter().zip(&idx).map(|(&k, &s)| s * src_strides[k]).sum();
            *slot = values[src].clone();
            increment(&mut idx, &sorted_cards);
        }
        Factor { vars: sorted_vars, cards: sorted_cards, values: out }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[Polynomial] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Zeroes every entry where `var` is not in state `state`. No-op if `var` is out of scope.
    pub fn restrict(&mut self, var: usize, state: usize) {
        let Some(k) = self.vars.iter().position(|&v| v == var) else { return };
        let st = strides(&self.cards);
        for (i, v) in self.values.iter_mut().enumerate() {
            if (i / st[k]) % self.cards[k] != state {
                *v = Polynomial::zero();
            }
        }
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut vars = Vec::with_capacity(self.vars.len() + other.vars.len());
        let mut cards = Vec::with_capacity(vars.capacity());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() || j < other.vars.len() {
            let take_left = j >= other.vars.len() || (i < self.vars.len() && self.vars[i] <= other.vars[j]);
            if take_left {
                if j < other.vars.len() && self.vars[i] == other.vars[j] {
                    j += 1;
                }
                vars.push(self.vars[i]);
                cards.push(self.cards[i]);
                i += 1;
            } else {
                vars.push(other.vars[j]);
                cards.push(other.cards[j]);
                j += 1;
            }
        }
        let map_a = projection_strides(&vars, &self.vars, &self.cards);
        let map_b = projection_strides(&vars, &other.vars, &other.cards);
        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut idx = vec![0usize; vars.len()];
        for _ in 0..size {
            let ia: usize = idx.iter().zip(&map_a).map(|(s, m)| s * m).sum();
            let ib: usize = idx.iter().zip(&map_b).map(|(s, m)| s * m).sum();
            values.push(&self.values[ia] * &other.values[ib]);
            increment(&mut idx, &cards);
        }
        Factor { vars, cards, values }
    }

    /// Sums out every variable not in `keep`.
    pub fn marginalize_to(&self, keep: &[usize]) -> Factor {
        let kept: Vec<usize> = (0..self.vars.len()).filter(|&k| keep.contains(&self.vars[k])).collect();
        let vars: Vec<usize> = kept.iter().map(|&k| self.vars[k]).collect();
        let cards: Vec<usize> = kept.iter().map(|&k| self.cards[k]).collect();
        if vars.len() == self.vars.len() {
            return self.clone();
        }
        let out_strides = strides(&cards);
        let mut map = vec![0usize; self.vars.len()];
        for (pos, &k) in kept.iter().enumerate() {
            map[k] = out_strides[pos];
        }
        let mut values = vec![Polynomial::zero(); cards.iter().product()];
        let mut idx = vec![0usize; self.vars.len()];
        for v in &self.values {
            if !v.is_zero() {
                let target: usize = idx.iter().zip(&map).map(|(s, m)| s * m).sum();
                values[target] += v;
            }
            increment(&mut idx, &self.cards);
        }
        Factor { vars, cards, values }
    }
}

pub(crate) fn strides(cards: &[usize]) -> Vec<usize> {
    let mut out = vec![1usize; cards.len()];
    for k in (0..cards.len().saturating_sub(1)).rev() {
        out[k] = out[k + 1] * cards[k + 1];
    }
    out
}

/// For each variable of `scope`, its stride inside a factor over `sub` (0 if absent).
fn projection_strides(scope: &[usize], sub: &[usize], sub_cards: &[usize]) -> Vec<usize> {
    let st = strides(sub_cards);
    scope.iter().map(|v| sub.iter().position(|w| w == v).map_or(0, |k| st[k])).collect()
}

pub(crate) fn increment(idx: &mut [usize], cards: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < cards[k] {
            return;
        }
        idx[k] = 0;
    }
}
