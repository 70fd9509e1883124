//! Allocation algorithms for indivisible chores.

mod classify;
mod densest;
mod efx;
mod two_agents;

pub use classify::{
    classify_instance, densest_first_without_zero_chores, special_cases, zero_disutility_chores, SpecialCase,
};
pub use densest::{densest_first, DensestFirstResult, DensestFirstRun, SolveOutcome, Step};
pub use efx::{find_manageable_set, solve_efx, solve_efx_traced, EfxOutcome, ManageableSet};
pub use two_agents::{solve_two_agents, solve_two_agents_traced};

use crate::fairness::KernelError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("verification intractable: {0}")]
    VerificationIntractable(#[from] KernelError),
    #[error("algorithm needs exactly {expected} agents, instance has {found}")]
    WrongAgentCount { expected: usize, found: usize },
}
