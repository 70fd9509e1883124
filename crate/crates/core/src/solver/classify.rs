use crate::fairness::EnvyCriterion;
use crate::model::{Bundle, Instance};
use crate::rational::Rational;
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpecialCase {
    /// Every chore has the same disutility.
    IdenticallyValued,
    /// Every disutility is either zero or one common positive value.
    BinaryDisutility,
    IdenticallySized,
    IdenticallyDense,
    IdenticalBudgets,
    TwoAgents,
}

impl SpecialCase {
    pub const ALL: [SpecialCase; 6] = [
        SpecialCase::IdenticallyValued,
        SpecialCase::BinaryDisutility,
        SpecialCase::IdenticallySized,
        SpecialCase::IdenticallyDense,
        SpecialCase::IdenticalBudgets,
        SpecialCase::TwoAgents,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpecialCase::IdenticallyValued => "identically-valued",
            SpecialCase::BinaryDisutility => "binary-disutility",
            SpecialCase::IdenticallySized => "identically-sized",
            SpecialCase::IdenticallyDense => "identically-dense",
            SpecialCase::IdenticalBudgets => "identical-budgets",
            SpecialCase::TwoAgents => "two-agents",
        }
    }
}

impl fmt::Display for SpecialCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SpecialCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpecialCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown special case `{s}`"))
    }
}

fn all_equal<'a>(mut values: impl Iterator<Item = &'a Rational>) -> bool {
    match values.next() {
        None => true,
        Some(first) => values.all(|v| v == first),
    }
}

/// Special cases present in `instance`, determined by exact equality.
pub fn special_cases(instance: &Instance) -> Vec<SpecialCase> {
    let chores = instance.chores();
    let mut flags = Vec::new();
    if all_equal(chores.iter().map(|c| &c.disutility)) {
        flags.push(SpecialCase::IdenticallyValued);
    }
    if all_equal(chores.iter().map(|c| &c.disutility).filter(|d| !d.is_zero())) {
        flags.push(SpecialCase::BinaryDisutility);
    }
    if all_equal(chores.iter().map(|c| &c.size)) {
        flags.push(SpecialCase::IdenticallySized);
    }
    let densities: Vec<Rational> = chores.iter().map(|c| c.density()).collect();
    if all_equal(densities.iter()) {
        flags.push(SpecialCase::IdenticallyDense);
    }
    if all_equal(instance.budgets().iter()) {
        flags.push(SpecialCase::IdenticalBudgets);
    }
    if instance.num_agents() == 2 {
        flags.push(SpecialCase::TwoAgents);
    }
    flags
}

/// Special cases and the envy-freeness level the solvers guarantee:
/// EF1 if any special case applies, EF2 otherwise.
pub fn classify_instance(instance: &Instance) -> (Vec<SpecialCase>, EnvyCriterion) {
    let flags = special_cases(instance);
    let guaranteed = if flags.is_empty() {
        EnvyCriterion::EF2
    } else {
        EnvyCriterion::EF1
    };
    (flags, guaranteed)
}

/// Splits off zero-disutility chores, which the binary-disutility case
/// leaves with the housekeeper.
pub fn zero_disutility_chores(instance: &Instance) -> Bundle {
    instance
        .chores()
        .iter()
        .filter(|c| c.disutility.is_zero())
        .map(|c| c.id)
        .collect()
}

/// `DensestFirst` with zero-disutility chores kept by the housekeeper.
pub fn densest_first_without_zero_chores(instance: &Instance) -> super::SolveOutcome {
    let zeros = zero_disutility_chores(instance);
    let useful: Bundle = (0..instance.num_chores()).filter(|&c| !zeros.contains(c)).collect();
    let out = super::densest_first(instance, None, Some(&useful));
    debug_assert!(zeros.iter().all(|c| out.allocation.housekeeper().contains(c)));
    out
}
