use super::densest::{DensestFirstRun, SolveOutcome};
use super::SolverError;
use crate::model::{Allocation, Bundle, Instance};

/// EF1 for two agents.
///
/// Both agents first run `DensestFirst` with the smaller budget; the
/// heavier of the two bundles goes to the smaller-budget agent, and the
/// larger-budget agent then runs `DensestFirst` alone on what is left.
pub fn solve_two_agents(instance: &Instance) -> Result<Allocation, SolverError> {
    solve_two_agents_traced(instance).map(|o| o.allocation)
}

pub fn solve_two_agents_traced(instance: &Instance) -> Result<SolveOutcome, SolverError> {
    if instance.num_agents() != 2 {
        return Err(SolverError::WrongAgentCount {
            expected: 2,
            found: instance.num_agents(),
        });
    }
    let budgets = instance.budgets();
    let (small, large) = if budgets[0] <= budgets[1] { (0, 1) } else { (1, 0) };
    let all: Bundle = (0..instance.num_chores()).collect();

    let equal = DensestFirstRun::new(instance, vec![budgets[small].clone(), budgets[small].clone()], all.clone()).run();
    let [first, second]: [Bundle; 2] = equal.bundles.try_into().expect("two bundles");
    let small_bundle = if first.disutility(instance) >= second.disutility(instance) {
        first
    } else {
        second
    };

    let rest: Bundle = all.iter().filter(|&c| !small_bundle.contains(c)).collect();
    let alone = DensestFirstRun::new(instance, vec![budgets[large].clone()], rest).run();
    let mut bundles = vec![Bundle::empty(); 3];
    bundles[small] = small_bundle;
    bundles[large] = alone.bundles.into_iter().next().expect("one bundle");
    bundles[2] = alone.remaining;
    Ok(SolveOutcome {
        allocation: Allocation::from_bundles(bundles),
        iterations: equal.iterations + alone.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::{verify, EnvyCriterion};

    #[test]
    fn heavier_equal_budget_bundle_goes_to_smaller_budget() {
        let inst = Instance::from_ints(&[(5, 10), (5, 6)], &[5, 10]).unwrap();
        let alloc = solve_two_agents(&inst).unwrap();
        assert_eq!(alloc, Allocation::from_owners(&[0, 1], 2));
        assert!(verify(&alloc, EnvyCriterion::EF1, &inst).unwrap().satisfied);
    }

    #[test]
    fn restores_input_agent_order() {
        let inst = Instance::from_ints(&[(5, 10), (5, 6)], &[10, 5]).unwrap();
        assert_eq!(solve_two_agents(&inst).unwrap(), Allocation::from_owners(&[1, 0], 2));
    }

    #[test]
    fn degenerate_inputs() {
        let empty = Instance::from_ints(&[], &[1, 2]).unwrap();
        assert_eq!(solve_two_agents(&empty).unwrap(), Allocation::initial(&empty));
        let three = Instance::from_ints(&[(1, 1)], &[1, 2, 3]).unwrap();
        assert!(matches!(
            solve_two_agents(&three),
            Err(SolverError::WrongAgentCount { found: 3, .. })
        ));
    }
}
