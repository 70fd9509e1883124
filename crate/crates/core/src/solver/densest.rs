use crate::model::{Allocation, Bundle, Instance};
use crate::rational::Rational;
use num_traits::Zero;
use std::cmp::Ordering;

/// What a single `DensestFirst` iteration did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// Agent (position in the run's agent list) received a chore.
    Assigned { agent: usize, chore: usize },
    /// Agent had no remaining chore that fits and left the live set.
    Retired { agent: usize },
}

/// An in-progress `DensestFirst` run over a chosen set of agents, budgets
/// and chores.
///
/// Agents are identified by their position in `budgets`; ties on minimum
/// disutility go to the lowest position.
#[derive(Debug, Clone)]
pub struct DensestFirstRun<'a> {
    instance: &'a Instance,
    budgets: Vec<Rational>,
    bundles: Vec<Bundle>,
    loads: Vec<Rational>,
    burdens: Vec<Rational>,
    live: Vec<bool>,
    remaining: Bundle,
    iterations: usize,
}

impl<'a> DensestFirstRun<'a> {
    pub fn new(instance: &'a Instance, budgets: Vec<Rational>, chores: Bundle) -> Self {
        let n = budgets.len();
        DensestFirstRun {
            instance,
            budgets,
            bundles: vec![Bundle::empty(); n],
            loads: vec![Rational::zero(); n],
            burdens: vec![Rational::zero(); n],
            live: vec![true; n],
            remaining: chores,
            iterations: 0,
        }
    }

    /// Performs one loop iteration, or returns `None` once no agent is live
    /// or no chore remains.
    pub fn step(&mut self) -> Option<Step> {
        if self.remaining.is_empty() {
            return None;
        }
        let agent = (0..self.budgets.len())
            .filter(|&i| self.live[i])
            .min_by(|&a, &b| self.burdens[a].cmp(&self.burdens[b]).then(a.cmp(&b)))?;
        self.iterations += 1;
        let room = &self.budgets[agent] - &self.loads[agent];
        let chores = self.instance.chores();
        let best = self
            .remaining
            .iter()
            .filter(|&c| chores[c].size <= room)
            .max_by(|&a, &b| denser_first(&chores[a], &chores[b]).reverse());
        match best {
            None => {
                self.live[agent] = false;
                Some(Step::Retired { agent })
            }
            Some(chore) => {
                self.remaining.remove(chore);
                self.bundles[agent].insert(chore);
                self.loads[agent] += &chores[chore].size;
                self.burdens[agent] += &chores[chore].disutility;
                Some(Step::Assigned { agent, chore })
            }
        }
    }

    pub fn run(mut self) -> DensestFirstResult {
        while self.step().is_some() {}
        self.finish()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn remaining(&self) -> &Bundle {
        &self.remaining
    }

    pub fn finish(self) -> DensestFirstResult {
        DensestFirstResult {
            bundles: self.bundles,
            remaining: self.remaining,
            iterations: self.iterations,
        }
    }
}

/// `Less` when `a` should be picked before `b`: higher density, then
/// smaller size, then lower id.
fn denser_first(a: &crate::model::Chore, b: &crate::model::Chore) -> Ordering {
    (&b.disutility * &a.size)
        .cmp(&(&a.disutility * &b.size))
        .then_with(|| a.size.cmp(&b.size))
        .then(a.id.cmp(&b.id))
}

#[derive(Debug, Clone)]
pub struct DensestFirstResult {
    pub bundles: Vec<Bundle>,
    pub remaining: Bundle,
    pub iterations: usize,
}

/// Result of a full-instance run.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub allocation: Allocation,
    pub iterations: usize,
}

/// Greedy densest-chore-first allocation to the least burdened agent.
///
/// `budget_override` replaces the instance budgets; `chore_subset`
/// restricts the chores handed out (the rest stay with the housekeeper).
pub fn densest_first(
    instance: &Instance,
    budget_override: Option<&[Rational]>,
    chore_subset: Option<&Bundle>,
) -> SolveOutcome {
    let budgets = budget_override
        .map(<[Rational]>::to_vec)
        .unwrap_or_else(|| instance.budgets().to_vec());
    assert_eq!(budgets.len(), instance.num_agents(), "one budget per agent");
    let chores = chore_subset
        .cloned()
        .unwrap_or_else(|| (0..instance.num_chores()).collect());
    let result = DensestFirstRun::new(instance, budgets, chores).run();
    let mut bundles = result.bundles;
    let mut housekeeper = result.remaining;
    for c in 0..instance.num_chores() {
        if !bundles.iter().any(|b| b.contains(c)) {
            housekeeper.insert(c);
        }
    }
    bundles.push(housekeeper);
    SolveOutcome {
        allocation: Allocation::from_bundles(bundles),
        iterations: result.iterations,
    }
}
