//! Envy-freeness verifiers for indivisible allocations.
//!
//! Every agent and the housekeeper is checked as an envier against every
//! agent; the housekeeper is never envied. An envier `i` envies agent `j`
//! through a subset `S` of its own bundle with `s(S) <= B_j` whose
//! disutility, after the criterion's removal rule, exceeds `d(A_j)`.

mod knapsack;
mod prefix;

pub use knapsack::{envy_surplus, find_violation, KernelError, Removal, DP_CELL_LIMIT, ENUMERATION_LIMIT};
pub use prefix::{
    density_order, ef_count, ef_count_values, fractional_ef_count, prefix_by_count, prefix_by_size,
    FractionalPrefix,
};

use crate::model::{Allocation, Bundle, Instance, ModelError};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FairnessError {
    #[error("verification intractable: {0}")]
    VerificationIntractable(#[from] KernelError),
    #[error(transparent)]
    InvalidAllocation(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvyCriterion {
    Ef,
    /// Envy-free up to some `k` chores, `k >= 1`.
    Efk(usize),
    /// Envy-free up to any chore.
    Efx,
}

impl EnvyCriterion {
    pub const EF1: EnvyCriterion = EnvyCriterion::Efk(1);
    pub const EF2: EnvyCriterion = EnvyCriterion::Efk(2);

    fn removal(self) -> Removal {
        match self {
            EnvyCriterion::Ef => Removal::Largest(0),
            EnvyCriterion::Efk(k) => Removal::Largest(k),
            EnvyCriterion::Efx => Removal::Smallest,
        }
    }
}

impl fmt::Display for EnvyCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvyCriterion::Ef => write!(f, "ef"),
            EnvyCriterion::Efk(k @ (1 | 2)) => write!(f, "ef{k}"),
            EnvyCriterion::Efk(k) => write!(f, "efk:{k}"),
            EnvyCriterion::Efx => write!(f, "efx"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown criterion `{0}` (expected ef, ef1, ef2, efk:K or efx)")]
pub struct ParseCriterionError(pub String);

impl FromStr for EnvyCriterion {
    type Err = ParseCriterionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "ef" => Ok(EnvyCriterion::Ef),
            "ef1" => Ok(EnvyCriterion::EF1),
            "ef2" => Ok(EnvyCriterion::EF2),
            "efx" => Ok(EnvyCriterion::Efx),
            other => other
                .strip_prefix("efk:")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .map(EnvyCriterion::Efk)
                .ok_or_else(|| ParseCriterionError(s.to_string())),
        }
    }
}

/// A concrete violation: `subset` of the envier's bundle fits `B_envied`
/// and still outweighs the envied bundle after removal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Bundle index; `n` is the housekeeper.
    pub envier: usize,
    pub envied: usize,
    pub subset: Bundle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvyReport {
    pub satisfied: bool,
    pub witness: Option<Witness>,
}

impl EnvyReport {
    pub fn satisfied() -> Self {
        EnvyReport {
            satisfied: true,
            witness: None,
        }
    }

    pub fn violated(witness: Witness) -> Self {
        EnvyReport {
            satisfied: false,
            witness: Some(witness),
        }
    }
}

/// Checks `criterion` for every ordered pair (envier, envied agent).
///
/// The reported witness is the first violating pair in lexicographic order.
pub fn verify(
    allocation: &Allocation,
    criterion: EnvyCriterion,
    instance: &Instance,
) -> Result<EnvyReport, FairnessError> {
    allocation.check(instance)?;
    let n = instance.num_agents();
    let envied_disutility = allocation.agent_disutilities(instance);
    for envier in 0..=n {
        let source = allocation.bundle(envier);
        if source.is_empty() {
            continue;
        }
        for envied in 0..n {
            // Own-bundle subsets never outweigh the bundle itself.
            if envier == envied {
                continue;
            }
            if let Some(subset) = find_violation(
                source,
                instance.budget(envied),
                criterion.removal(),
                &envied_disutility[envied],
                instance,
            )? {
                return Ok(EnvyReport::violated(Witness {
                    envier,
                    envied,
                    subset,
                }));
            }
        }
    }
    Ok(EnvyReport::satisfied())
}

/// The criterion's removal test for a single subset: `true` if `subset`
/// (of any bundle) fitting `budget` is not envied against `envied_disutility`.
pub fn subset_passes(
    subset: &Bundle,
    criterion: EnvyCriterion,
    envied_disutility: &crate::Rational,
    instance: &Instance,
) -> bool {
    let mut values: Vec<_> = subset.iter().map(|c| instance.chore(c).disutility.clone()).collect();
    values.sort_by(|a, b| b.cmp(a));
    let total: crate::Rational = values.iter().sum();
    let after = match criterion {
        EnvyCriterion::Ef => total,
        EnvyCriterion::Efk(k) => total - values.iter().take(k).sum::<crate::Rational>(),
        EnvyCriterion::Efx => match values.last() {
            Some(min) => total.clone() - min,
            None => total,
        },
    };
    after <= *envied_disutility
}
