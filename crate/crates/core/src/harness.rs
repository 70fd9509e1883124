//! Random instances and exhaustive allocation oracles.

use crate::fairness::{verify, EnvyCriterion, FairnessError};
use crate::model::{Allocation, Instance};
use crate::rational::{denominator_lcm, ratio, Rational};
use crate::solver::SpecialCase;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest assignment space `(n+1)^m` the oracles will walk.
pub const ORACLE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("{agents} agents and {chores} chores exceed the enumeration cap")]
    OracleTooLarge { agents: usize, chores: usize },
    #[error(transparent)]
    Fairness(#[from] FairnessError),
}

/// Inclusive ranges for every drawn quantity. Values are integers divided
/// by `denominator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub agents: (usize, usize),
    pub chores: (usize, usize),
    pub sizes: (i64, i64),
    pub disutilities: (i64, i64),
    pub budgets: (i64, i64),
    pub denominator: i64,
    pub special_case: Option<SpecialCase>,
    /// Adds a per-agent disutility matrix (divisible instances only).
    pub subjective: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            agents: (1, 4),
            chores: (1, 10),
            sizes: (1, 20),
            disutilities: (1, 20),
            budgets: (1, 20),
            denominator: 1,
            special_case: None,
            subjective: false,
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |what: &str| Err(HarnessError::InvalidConfig(what.to_string()));
        if self.agents.0 > self.agents.1 || self.agents.0 == 0 {
            return bad("agent range must be non-empty and start at 1 or more");
        }
        if self.chores.0 > self.chores.1 {
            return bad("chore range is empty");
        }
        if self.sizes.0 > self.sizes.1 || self.sizes.0 < 1 {
            return bad("size range must be non-empty and positive");
        }
        if self.disutilities.0 > self.disutilities.1 || self.disutilities.0 < 0 {
            return bad("disutility range must be non-empty and non-negative");
        }
        if self.budgets.0 > self.budgets.1 || self.budgets.0 < 1 {
            return bad("budget range must be non-empty and positive");
        }
        if self.denominator < 1 {
            return bad("denominator must be positive");
        }
        if self.special_case == Some(SpecialCase::TwoAgents) && !(self.agents.0..=self.agents.1).contains(&2) {
            return bad("two-agents needs 2 in the agent range");
        }
        Ok(())
    }
}

struct Draw {
    rng: ChaCha8Rng,
    denominator: i64,
}

impl Draw {
    fn value(&mut self, (lo, hi): (i64, i64)) -> Rational {
        let d = self.denominator;
        ratio(self.rng.gen_range(lo * d..=hi * d), d)
    }
}

/// Deterministic in the config, including its seed.
pub fn generate(config: &GeneratorConfig) -> Result<Instance, HarnessError> {
    config.validate()?;
    let mut draw = Draw {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        denominator: config.denominator,
    };
    let n = match config.special_case {
        Some(SpecialCase::TwoAgents) => 2,
        _ => draw.rng.gen_range(config.agents.0..=config.agents.1),
    };
    let m = draw.rng.gen_range(config.chores.0..=config.chores.1);
    let case = config.special_case;

    let common_size = draw.value(config.sizes);
    let sizes: Vec<Rational> = (0..m)
        .map(|_| match case {
            Some(SpecialCase::IdenticallySized) => common_size.clone(),
            _ => draw.value(config.sizes),
        })
        .collect();

    let common_value = draw.value((config.disutilities.0.max(1), config.disutilities.1.max(1)));
    let density = draw.value(config.disutilities);
    let disutilities: Vec<Rational> = sizes
        .iter()
        .map(|s| match case {
            Some(SpecialCase::IdenticallyValued) => common_value.clone(),
            Some(SpecialCase::BinaryDisutility) => {
                if draw.rng.gen_ratio(1, 3) {
                    Rational::from_integer(0.into())
                } else {
                    common_value.clone()
                }
            }
            Some(SpecialCase::IdenticallyDense) => s * &density,
            _ => draw.value(config.disutilities),
        })
        .collect();

    let common_budget = draw.value(config.budgets);
    let budgets: Vec<Rational> = (0..n)
        .map(|_| match case {
            Some(SpecialCase::IdenticalBudgets) => common_budget.clone(),
            _ => draw.value(config.budgets),
        })
        .collect();

    let matrix = config.subjective.then(|| {
        (0..n)
            .map(|_| (0..m).map(|_| draw.value(config.disutilities)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    });
    let instance = Instance::new(sizes.into_iter().zip(disutilities).collect(), budgets)
        .expect("generated values respect the validated ranges");
    Ok(match matrix {
        Some(matrix) => instance
            .with_disutility_matrix(matrix)
            .expect("matrix shape matches the instance"),
        None => instance,
    })
}

/// Size of the assignment space, or `None` past the cap.
fn assignment_space(instance: &Instance) -> Option<u64> {
    let base = instance.num_agents() as u64 + 1;
    let mut total: u64 = 1;
    for _ in 0..instance.num_chores() {
        total = total.checked_mul(base).filter(|&t| t <= ORACLE_LIMIT)?;
    }
    Some(total)
}

/// Every feasible allocation, each exactly once, in odometer order over
/// chore owners (chore 1 changes slowest).
pub struct AllocationIter {
    n: usize,
    sizes: Vec<i128>,
    caps: Vec<i128>,
    owners: Vec<usize>,
    loads: Vec<i128>,
    done: bool,
}

impl AllocationIter {
    fn feasible(&self) -> bool {
        self.loads.iter().zip(&self.caps).all(|(l, c)| l <= c)
    }

    fn advance(&mut self) {
        for j in (0..self.owners.len()).rev() {
            let old = self.owners[j];
            if old < self.n {
                self.loads[old] -= self.sizes[j];
            }
            if old == 0 {
                self.owners[j] = self.n;
                continue;
            }
            self.owners[j] = old - 1;
            self.loads[old - 1] += self.sizes[j];
            return;
        }
        self.done = true;
    }

    fn current(&self) -> Allocation {
        Allocation::from_owners(&self.owners, self.n)
    }
}

impl Iterator for AllocationIter {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        while !self.done {
            let found = self.feasible().then(|| self.current());
            self.advance();
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// All feasible allocations. Errors when `(n+1)^m` exceeds [`ORACLE_LIMIT`].
pub fn enumerate_allocations(instance: &Instance) -> Result<AllocationIter, HarnessError> {
    let too_large = || HarnessError::OracleTooLarge {
        agents: instance.num_agents(),
        chores: instance.num_chores(),
    };
    assignment_space(instance).ok_or_else(too_large)?;
    let scale = Rational::from_integer(denominator_lcm(
        instance.chores().iter().map(|c| &c.size).chain(instance.budgets()),
    ));
    let to_int = |v: &Rational| (v * &scale).to_integer().to_i128();
    let sizes = instance
        .chores()
        .iter()
        .map(|c| to_int(&c.size))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(too_large)?;
    let caps = instance
        .budgets()
        .iter()
        .map(to_int)
        .collect::<Option<Vec<_>>>()
        .ok_or_else(too_large)?;
    let n = instance.num_agents();
    // Start with every chore at the housekeeper and count owners downward.
    Ok(AllocationIter {
        n,
        sizes,
        caps,
        owners: vec![n; instance.num_chores()],
        loads: vec![0; n],
        done: false,
    })
}

/// Whether some feasible allocation satisfies `criterion`.
pub fn oracle_exists(instance: &Instance, criterion: EnvyCriterion) -> Result<bool, HarnessError> {
    for allocation in enumerate_allocations(instance)? {
        if verify(&allocation, criterion, instance)?.satisfied {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Every feasible allocation satisfying `criterion`.
pub fn oracle_allocations(instance: &Instance, criterion: EnvyCriterion) -> Result<Vec<Allocation>, HarnessError> {
    let mut out = Vec::new();
    for allocation in enumerate_allocations(instance)? {
        if verify(&allocation, criterion, instance)?.satisfied {
            out.push(allocation);
        }
    }
    Ok(out)
}
