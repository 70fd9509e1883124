//! Exact knapsack kernels behind the envy checks.
//!
//! Both kernels answer the same question: over all subsets `S` of a source
//! bundle with `s(S) <= budget`, how large can `d(S)` be after a removal
//! rule is applied to `S`? Small bundles are enumerated in lexicographic
//! order; larger ones go through a pseudopolynomial DP over integer-scaled
//! sizes.

use crate::model::{Bundle, Instance};
use crate::rational::{denominator_lcm, Rational};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Bundles with at most this many chores are checked by exhaustive enumeration.
pub const ENUMERATION_LIMIT: usize = 25;

/// Upper bound on DP cells (items x removal states x scaled capacity).
pub const DP_CELL_LIMIT: u64 = 10_000_000;

/// Which chores are discounted from `d(S)` before comparing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Removal {
    /// Subtract the `k` largest disutilities in `S` (all of `S` if `|S| < k`).
    Largest(usize),
    /// Subtract the single smallest disutility in `S` (nothing for `S = {}`).
    Smallest,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("bundle of {chores} chores needs a DP table of {cells} cells (limit {DP_CELL_LIMIT})")]
    Intractable { chores: usize, cells: String },
}

struct Item {
    id: usize,
    size: i128,
    value: i128,
}

/// Integer image of a subproblem: sizes scaled by the LCM of the size and
/// budget denominators, disutilities by the LCM of disutility denominators.
struct Scaled {
    items: Vec<Item>,
    capacity: i128,
    value_scale: BigInt,
}

fn to_i128(v: BigInt, chores: usize) -> Result<i128, KernelError> {
    v.to_i128().ok_or(KernelError::Intractable {
        chores,
        cells: "overflow".into(),
    })
}

impl Scaled {
    fn new(
        source: &Bundle,
        budget: &Rational,
        threshold: Option<&Rational>,
        instance: &Instance,
    ) -> Result<Self, KernelError> {
        let chores = source.len();
        let size_scale = denominator_lcm(
            source
                .iter()
                .map(|c| &instance.chore(c).size)
                .chain(std::iter::once(budget)),
        );
        let value_scale = denominator_lcm(
            source
                .iter()
                .map(|c| &instance.chore(c).disutility)
                .chain(threshold),
        );
        let scaled_budget = (budget * Rational::from_integer(size_scale.clone())).floor();
        let capacity = to_i128(scaled_budget.to_integer(), chores)?;
        let mut items = Vec::with_capacity(chores);
        for id in source.iter() {
            let chore = instance.chore(id);
            let size = (&chore.size * Rational::from_integer(size_scale.clone())).to_integer();
            let value = (&chore.disutility * Rational::from_integer(value_scale.clone())).to_integer();
            items.push(Item {
                id,
                size: to_i128(size, chores)?,
                value: to_i128(value, chores)?,
            });
        }
        Ok(Scaled {
            items,
            capacity,
            value_scale,
        })
    }

    fn scale_value(&self, v: &Rational) -> Result<i128, KernelError> {
        to_i128(
            (v * Rational::from_integer(self.value_scale.clone())).to_integer(),
            self.items.len(),
        )
    }

    fn unscale(&self, v: i128) -> Rational {
        Rational::new(BigInt::from(v), self.value_scale.clone())
    }
}

fn post_removal(values: &mut [i128], removal: Removal) -> i128 {
    let total: i128 = values.iter().sum();
    match removal {
        Removal::Largest(0) => total,
        Removal::Largest(k) => {
            values.sort_unstable_by(|a, b| b.cmp(a));
            total - values.iter().take(k).sum::<i128>()
        }
        Removal::Smallest => total - values.iter().min().copied().unwrap_or(0),
    }
}

/// Depth-first enumeration in lexicographic order of sorted id sequences.
/// `visit` returns `true` to stop early.
fn enumerate(scaled: &Scaled, removal: Removal, mut visit: impl FnMut(&[usize], i128) -> bool) {
    fn go(
        scaled: &Scaled,
        removal: Removal,
        start: usize,
        used: i128,
        chosen: &mut Vec<usize>,
        scratch: &mut Vec<i128>,
        visit: &mut dyn FnMut(&[usize], i128) -> bool,
    ) -> bool {
        scratch.clear();
        scratch.extend(chosen.iter().map(|&k| scaled.items[k].value));
        let value = post_removal(scratch, removal);
        if visit(chosen, value) {
            return true;
        }
        for next in start..scaled.items.len() {
            let size = used + scaled.items[next].size;
            if size > scaled.capacity {
                continue;
            }
            chosen.push(next);
            let stop = go(scaled, removal, next + 1, size, chosen, scratch, visit);
            chosen.pop();
            if stop {
                return true;
            }
        }
        false
    }
    let mut chosen = Vec::new();
    let mut scratch = Vec::new();
    go(scaled, removal, 0, 0, &mut chosen, &mut scratch, &mut visit);
}

/// Result of the DP: best post-removal value and one subset attaining it.
fn dynamic_program(scaled: &Scaled, removal: Removal) -> Result<(i128, Vec<usize>), KernelError> {
    let (k, descending) = match removal {
        Removal::Largest(k) => (k, true),
        Removal::Smallest => (1, false),
    };
    let chores = scaled.items.len();
    // Only items that fit on their own matter.
    let mut order: Vec<usize> = (0..chores)
        .filter(|&i| scaled.items[i].size <= scaled.capacity)
        .collect();
    // The first `k` chosen items in this order are exactly the ones removed.
    order.sort_by(|&a, &b| {
        let (x, y) = (&scaled.items[a], &scaled.items[b]);
        let by_value = if descending { y.value.cmp(&x.value) } else { x.value.cmp(&y.value) };
        by_value.then(x.id.cmp(&y.id))
    });
    let k = k.min(order.len());
    let width = scaled.capacity.max(0) as u64 + 1;
    let states = k as u64 + 1;
    let cells = (order.len() as u64).max(1) * states * width;
    if cells > DP_CELL_LIMIT {
        return Err(KernelError::Intractable {
            chores,
            cells: cells.to_string(),
        });
    }
    let width = width as usize;
    let states = states as usize;
    const NONE: i128 = i128::MIN;
    let idx = |r: usize, w: usize| r * width + w;
    let mut table = vec![NONE; states * width];
    for w in 0..width {
        table[idx(0, w)] = 0;
    }
    // 0 = skipped, 1 = taken as removed (r-1 -> r), 2 = taken and kept (r = k).
    let mut decisions: Vec<Vec<u8>> = Vec::with_capacity(order.len());
    for &item in &order {
        let size = scaled.items[item].size as usize;
        let value = scaled.items[item].value;
        let mut next = table.clone();
        let mut choice = vec![0u8; states * width];
        for r in 0..states {
            for w in size..width {
                if r > 0 {
                    let prev = table[idx(r - 1, w - size)];
                    if prev != NONE && prev > next[idx(r, w)] {
                        next[idx(r, w)] = prev;
                        choice[idx(r, w)] = 1;
                    }
                }
                if r == k {
                    let prev = table[idx(k, w - size)];
                    if prev != NONE && prev + value > next[idx(r, w)] {
                        next[idx(r, w)] = prev + value;
                        choice[idx(r, w)] = 2;
                    }
                }
            }
        }
        table = next;
        decisions.push(choice);
    }
    let last = width - 1;
    let (mut r, best) = (0..states)
        .map(|r| (r, table[idx(r, last)]))
        .filter(|(_, v)| *v != NONE)
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .expect("empty subset is always reachable");
    let mut w = last;
    let mut picked = Vec::new();
    for (layer, &item) in order.iter().enumerate().rev() {
        match decisions[layer][idx(r, w)] {
            0 => {}
            1 => {
                picked.push(scaled.items[item].id);
                w -= scaled.items[item].size as usize;
                r -= 1;
            }
            _ => {
                picked.push(scaled.items[item].id);
                w -= scaled.items[item].size as usize;
            }
        }
    }
    picked.sort_unstable();
    Ok((best, picked))
}

/// Maximum over `S ⊆ source` with `s(S) <= budget` of `d(S)` after `removal`.
pub fn envy_surplus(
    source: &Bundle,
    budget: &Rational,
    removal: Removal,
    instance: &Instance,
) -> Result<Rational, KernelError> {
    if budget < &Rational::zero() {
        return Ok(Rational::zero());
    }
    let scaled = Scaled::new(source, budget, None, instance)?;
    let best = if source.len() <= ENUMERATION_LIMIT {
        let mut best = 0i128;
        enumerate(&scaled, removal, |_, v| {
            best = best.max(v);
            false
        });
        best
    } else {
        dynamic_program(&scaled, removal)?.0
    };
    Ok(scaled.unscale(best))
}

/// A subset of `source` fitting `budget` whose post-removal disutility
/// exceeds `threshold`, if any.
///
/// With enumeration the lexicographically smallest such subset is returned;
/// the DP path returns the subset attaining the maximum.
pub fn find_violation(
    source: &Bundle,
    budget: &Rational,
    removal: Removal,
    threshold: &Rational,
    instance: &Instance,
) -> Result<Option<Bundle>, KernelError> {
    if budget < &Rational::zero() {
        return Ok(None);
    }
    let scaled = Scaled::new(source, budget, Some(threshold), instance)?;
    let limit = scaled.scale_value(threshold)?;
    if source.len() <= ENUMERATION_LIMIT {
        let mut found = None;
        enumerate(&scaled, removal, |chosen, v| {
            if v > limit {
                found = Some(chosen.iter().map(|&k| scaled.items[k].id).collect());
                true
            } else {
                false
            }
        });
        Ok(found)
    } else {
        let (best, picked) = dynamic_program(&scaled, removal)?;
        Ok((best > limit).then(|| Bundle::new(picked)))
    }
}
