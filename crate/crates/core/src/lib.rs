//! Fair allocation of chores among agents with limited time budgets.
//!
//! Every chore has an objective size and disutility, every agent a budget,
//! and chores nobody takes end up with the housekeeper. All quantities are
//! exact rationals.
//!
//! The crate provides:
//!
//! * [`solver`]: the EFX manageable-set procedure, `DensestFirst` and the
//!   two-agent composition for indivisible chores, plus a special-case
//!   classifier.
//! * [`divisible`]: the density-domination algorithm for divisible chores.
//! * [`fairness`]: exact EF / EFk / EFX verifiers and envy-count utilities.
//! * [`lp`]: an exact rational phase-one simplex used for feasibility tests.
//! * [`harness`]: seeded instance generation and brute-force oracles.

pub mod divisible;
pub mod fairness;
pub mod harness;
pub mod lp;
pub mod model;
pub mod rational;
pub mod solver;

pub use fairness::{EnvyCriterion, EnvyReport, Witness};
pub use model::{Allocation, Bundle, Chore, Instance, ModelError};
pub use rational::Rational;
