//! EFX via repeated manageable-set assignment.
//!
//! While some subset of the housekeeper's bundle fits an agent's budget and
//! outweighs that agent's bundle, a minimum-cardinality such subset replaces
//! the agent's bundle; the displaced chores return to the housekeeper.

use super::SolverError;
use crate::fairness::KernelError;
use crate::fairness::DP_CELL_LIMIT;
use crate::model::{Allocation, Bundle, Instance};
use crate::rational::{denominator_lcm, Rational};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// A minimum-cardinality envied-by-housekeeper set and the agent receiving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManageableSet {
    pub chores: Bundle,
    pub target_agent: usize,
}

const NONE: i128 = i128::MIN;

/// Cardinality-indexed suffix knapsack over the housekeeper's chores:
/// `best(i, c, w)` is the maximum disutility of exactly `c` chores drawn
/// from positions `i..` with scaled size at most `w`.
struct SuffixTable {
    sizes: Vec<usize>,
    values: Vec<i128>,
    width: usize,
    max_count: usize,
    cells: Vec<i128>,
}

impl SuffixTable {
    fn build(sizes: Vec<usize>, values: Vec<i128>, width: usize) -> Result<Self, KernelError> {
        let h = sizes.len();
        let total = (h as u64 + 1) * (h as u64 + 1) * width as u64;
        if total > DP_CELL_LIMIT {
            return Err(KernelError::Intractable {
                chores: h,
                cells: total.to_string(),
            });
        }
        let max_count = h;
        let mut table = SuffixTable {
            sizes,
            values,
            width,
            max_count,
            cells: vec![NONE; total as usize],
        };
        for w in 0..width {
            let at = table.idx(h, 0, w);
            table.cells[at] = 0;
        }
        for i in (0..h).rev() {
            for c in 0..=max_count {
                for w in 0..width {
                    let mut best = table.cells[table.idx(i + 1, c, w)];
                    if c > 0 && table.sizes[i] <= w {
                        let prev = table.cells[table.idx(i + 1, c - 1, w - table.sizes[i])];
                        if prev != NONE {
                            best = best.max(prev + table.values[i]);
                        }
                    }
                    let at = table.idx(i, c, w);
                    table.cells[at] = best;
                }
            }
        }
        Ok(table)
    }

    fn idx(&self, i: usize, c: usize, w: usize) -> usize {
        (i * (self.max_count + 1) + c) * self.width + w
    }

    fn best(&self, i: usize, c: usize, w: usize) -> i128 {
        self.cells[self.idx(i, c, w.min(self.width - 1))]
    }

    /// Lexicographically smallest position set of exactly `count` chores,
    /// size at most `cap`, with disutility `target` (the maximum at `cap`).
    fn lex_smallest(&self, count: usize, cap: usize, target: i128) -> Vec<usize> {
        let mut picked = Vec::with_capacity(count);
        let (mut c, mut w, mut need) = (count, cap, target);
        for i in 0..self.sizes.len() {
            if c == 0 {
                break;
            }
            if self.sizes[i] <= w {
                let rest = self.best(i + 1, c - 1, w - self.sizes[i]);
                if rest != NONE && rest + self.values[i] >= need {
                    picked.push(i);
                    need -= self.values[i];
                    w -= self.sizes[i];
                    c -= 1;
                }
            }
        }
        debug_assert_eq!(c, 0);
        picked
    }
}

fn scaled(value: &Rational, scale: &BigInt) -> Result<i128, KernelError> {
    (value * Rational::from_integer(scale.clone()))
        .floor()
        .to_integer()
        .to_i128()
        .ok_or(KernelError::Intractable {
            chores: 0,
            cells: "overflow".into(),
        })
}

/// Finds a manageable set inside the housekeeper's bundle.
///
/// Cardinality is minimized first; among equal cardinality the maximum
/// disutility wins, then the lexicographically smallest chore set, then the
/// lowest agent index.
pub fn find_manageable_set(
    allocation: &Allocation,
    instance: &Instance,
) -> Result<Option<ManageableSet>, SolverError> {
    let housekeeper: Vec<usize> = allocation.housekeeper().iter().collect();
    if housekeeper.is_empty() {
        return Ok(None);
    }
    let n = instance.num_agents();
    let burdens = allocation.agent_disutilities(instance);
    let size_scale = denominator_lcm(
        housekeeper
            .iter()
            .map(|&c| &instance.chore(c).size)
            .chain(instance.budgets()),
    );
    let value_scale = denominator_lcm(
        housekeeper
            .iter()
            .map(|&c| &instance.chore(c).disutility)
            .chain(&burdens),
    );
    let caps: Vec<i128> = instance
        .budgets()
        .iter()
        .map(|b| scaled(b, &size_scale))
        .collect::<Result<_, _>>()?;
    let thresholds: Vec<i128> = burdens
        .iter()
        .map(|d| scaled(d, &value_scale))
        .collect::<Result<_, _>>()?;
    let max_cap = *caps.iter().max().expect("at least one agent");
    let mut sizes = Vec::with_capacity(housekeeper.len());
    let mut values = Vec::with_capacity(housekeeper.len());
    for &c in &housekeeper {
        let s = scaled(&instance.chore(c).size, &size_scale)?;
        // A chore larger than every budget can never be part of a candidate.
        sizes.push(s.min(max_cap + 1) as usize);
        values.push(scaled(&instance.chore(c).disutility, &value_scale)?);
    }
    let width = usize::try_from(max_cap + 1).map_err(|_| KernelError::Intractable {
        chores: housekeeper.len(),
        cells: "overflow".into(),
    })?;
    let table = SuffixTable::build(sizes, values, width)?;

    for count in 1..=housekeeper.len() {
        let best_per_agent: Vec<i128> = (0..n).map(|k| table.best(0, count, caps[k] as usize)).collect();
        let valid = (0..n).filter(|&k| best_per_agent[k] != NONE && best_per_agent[k] > thresholds[k]);
        let Some(target) = valid.map(|k| best_per_agent[k]).max() else {
            continue;
        };
        let cap = (0..n)
            .filter(|&k| thresholds[k] < target)
            .map(|k| caps[k])
            .max()
            .expect("the agent attaining the target qualifies");
        let positions = table.lex_smallest(count, cap as usize, target);
        let chores = Bundle::new(positions.iter().map(|&p| housekeeper[p]).collect());
        let size = chores.size(instance);
        let agent = (0..n)
            .find(|&k| thresholds[k] < target && size <= *instance.budget(k))
            .expect("the widest qualifying agent fits the set");
        return Ok(Some(ManageableSet {
            chores,
            target_agent: agent,
        }));
    }
    Ok(None)
}

/// Trace of an EFX run.
#[derive(Debug, Clone)]
pub struct EfxOutcome {
    pub allocation: Allocation,
    pub iterations: usize,
    /// `Σ_i d(A_i)` before the first and after every iteration.
    pub welfare_trace: Vec<Rational>,
}

pub fn solve_efx(instance: &Instance) -> Result<Allocation, SolverError> {
    solve_efx_traced(instance).map(|o| o.allocation)
}

pub fn solve_efx_traced(instance: &Instance) -> Result<EfxOutcome, SolverError> {
    let mut allocation = Allocation::initial(instance);
    let n = instance.num_agents();
    let mut welfare_trace = vec![Rational::zero()];
    let mut iterations = 0;
    while let Some(ManageableSet {
        chores,
        target_agent,
    }) = find_manageable_set(&allocation, instance)?
    {
        iterations += 1;
        let bundles = allocation.bundles_mut();
        let displaced = std::mem::replace(&mut bundles[target_agent], chores.clone());
        for c in chores.iter() {
            bundles[n].remove(c);
        }
        for c in displaced.iter() {
            bundles[n].insert(c);
        }
        welfare_trace.push(allocation.agent_disutilities(instance).into_iter().sum());
    }
    Ok(EfxOutcome {
        allocation,
        iterations,
        welfare_trace,
    })
}
