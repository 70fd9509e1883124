//! Density-ordered prefixes and envy counts.

use crate::model::{Bundle, Instance};
use crate::rational::Rational;
use num_traits::Zero;

/// Chores of `bundle` in non-increasing density order, ties by lower id.
pub fn density_order(bundle: &Bundle, instance: &Instance) -> Vec<usize> {
    let mut ids: Vec<usize> = bundle.iter().collect();
    ids.sort_by(|&a, &b| {
        let (ca, cb) = (instance.chore(a), instance.chore(b));
        // d_b s_a vs d_a s_b avoids building quotients.
        (&cb.disutility * &ca.size)
            .cmp(&(&ca.disutility * &cb.size))
            .then(a.cmp(&b))
    });
    ids
}

/// The `count` densest chores of `bundle`.
pub fn prefix_by_count(bundle: &Bundle, count: usize, instance: &Instance) -> Option<Bundle> {
    if count > bundle.len() {
        return None;
    }
    Some(Bundle::new(density_order(bundle, instance).into_iter().take(count).collect()))
}

/// A density-ordered prefix filled fractionally up to a size threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalPrefix {
    /// Whole chores, densest first.
    pub whole: Vec<usize>,
    /// The partially included next chore and its fraction in `(0, 1)`.
    pub fringe: Option<(usize, Rational)>,
}

impl FractionalPrefix {
    pub fn size(&self, instance: &Instance) -> Rational {
        let whole: Rational = self.whole.iter().map(|&c| &instance.chore(c).size).sum();
        match &self.fringe {
            Some((c, alpha)) => whole + alpha * &instance.chore(*c).size,
            None => whole,
        }
    }

    pub fn disutility(&self, instance: &Instance) -> Rational {
        self.item_disutilities(instance).into_iter().sum()
    }

    /// Disutility of every piece, the fringe contributing `alpha * d(c)`.
    pub fn item_disutilities(&self, instance: &Instance) -> Vec<Rational> {
        let mut items: Vec<Rational> = self
            .whole
            .iter()
            .map(|&c| instance.chore(c).disutility.clone())
            .collect();
        if let Some((c, alpha)) = &self.fringe {
            items.push(alpha * &instance.chore(*c).disutility);
        }
        items
    }
}

/// Largest density-ordered prefix of `bundle` with size at most `threshold`,
/// topped up with the matching fraction of the next chore.
pub fn prefix_by_size(bundle: &Bundle, threshold: &Rational, instance: &Instance) -> FractionalPrefix {
    let mut whole = Vec::new();
    let mut used = Rational::zero();
    for c in density_order(bundle, instance) {
        let size = &instance.chore(c).size;
        let after = &used + size;
        if after <= *threshold {
            whole.push(c);
            used = after;
        } else {
            let alpha = (threshold - &used) / size;
            let fringe = (alpha > Rational::zero()).then_some((c, alpha));
            return FractionalPrefix { whole, fringe };
        }
    }
    FractionalPrefix { whole, fringe: None }
}

/// Minimum number of pieces to drop from `values` so the rest sums to at most `target`.
///
/// Greedy removal of the largest pieces is optimal because removal is not
/// constrained by size.
pub fn ef_count_values(values: &[Rational], target: &Rational) -> usize {
    let mut sorted: Vec<&Rational> = values.iter().collect();
    sorted.sort_by(|a, b| b.cmp(a));
    let mut remaining: Rational = values.iter().sum();
    let mut removed = 0;
    for v in sorted {
        if remaining <= *target {
            break;
        }
        remaining -= v;
        removed += 1;
    }
    removed
}

/// `min |R|` over `R ⊆ X` with `d(X \ R) <= d(Y)`.
pub fn ef_count(x: &Bundle, y: &Bundle, instance: &Instance) -> usize {
    let values: Vec<Rational> = x.iter().map(|c| instance.chore(c).disutility.clone()).collect();
    ef_count_values(&values, &y.disutility(instance))
}

/// Envy count between two fractional prefixes, the fringe being one removable piece.
pub fn fractional_ef_count(x: &FractionalPrefix, y: &FractionalPrefix, instance: &Instance) -> usize {
    ef_count_values(&x.item_disutilities(instance), &y.disutility(instance))
}
