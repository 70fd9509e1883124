//! Envy-free allocation of divisible chores.
//!
//! The instance is augmented with a zero-disutility fictional chore large
//! enough to absorb every budget. A family of feasibility programs indexed by
//! an integer vector `τ` encodes density domination; `τ` starts at all ones
//! and is incremented one coordinate at a time until the equality-budget
//! program becomes feasible.

use crate::lp::{feasible, FeasibilityResult, LinearSystem, Relation};
use crate::model::{Instance, ModelError};
use crate::rational::{int, Rational};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DivisibleError {
    #[error("no agent admits a feasible relaxed program at tau = {0}")]
    InternalInvariantViolation(TauVector),
    #[error("invalid fractional allocation: {0}")]
    InvalidAllocation(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `(n+1) × m` matrix of fractions; the last row is the housekeeper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalAllocation {
    fractions: Vec<Vec<Rational>>,
}

impl FractionalAllocation {
    pub fn new(fractions: Vec<Vec<Rational>>) -> Self {
        Self { fractions }
    }

    /// Builds the allocation from agent rows; the housekeeper gets the rest
    /// of every column.
    pub fn from_agent_rows(rows: Vec<Vec<Rational>>, num_chores: usize) -> Self {
        let housekeeper = (0..num_chores)
            .map(|j| Rational::one() - rows.iter().map(|r| &r[j]).sum::<Rational>())
            .collect();
        let mut fractions = rows;
        fractions.push(housekeeper);
        Self { fractions }
    }

    /// Every chore entirely with the housekeeper.
    pub fn initial(instance: &Instance) -> Self {
        let m = instance.num_chores();
        Self::from_agent_rows(vec![vec![Rational::zero(); m]; instance.num_agents()], m)
    }

    pub fn num_agents(&self) -> usize {
        self.fractions.len() - 1
    }

    pub fn num_chores(&self) -> usize {
        self.fractions.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.fractions
    }

    pub fn row(&self, index: usize) -> &[Rational] {
        &self.fractions[index]
    }

    pub fn housekeeper(&self) -> &[Rational] {
        self.fractions.last().expect("housekeeper row")
    }

    pub fn fraction(&self, row: usize, chore: usize) -> &Rational {
        &self.fractions[row][chore]
    }

    pub fn size(&self, row: usize, instance: &Instance) -> Rational {
        self.fractions[row]
            .iter()
            .zip(instance.chores())
            .map(|(x, c)| x * &c.size)
            .sum()
    }

    /// Disutility of bundle `row` measured by `agent`.
    pub fn disutility(&self, row: usize, agent: usize, instance: &Instance) -> Rational {
        self.fractions[row]
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| x * instance.agent_disutility(agent, j))
            .sum()
    }

    /// Entries in `[0,1]`, columns summing to one, agent rows within budget.
    pub fn check(&self, instance: &Instance) -> Result<(), DivisibleError> {
        let (n, m) = (instance.num_agents(), instance.num_chores());
        if self.fractions.len() != n + 1 || self.fractions.iter().any(|r| r.len() != m) {
            return Err(DivisibleError::InvalidAllocation(format!(
                "expected a {} x {m} matrix",
                n + 1
            )));
        }
        let (zero, one) = (Rational::zero(), Rational::one());
        for (i, row) in self.fractions.iter().enumerate() {
            if let Some(j) = row.iter().position(|x| *x < zero || *x > one) {
                return Err(DivisibleError::InvalidAllocation(format!(
                    "fraction of chore {} in row {} is outside [0,1]",
                    j + 1,
                    i + 1
                )));
            }
        }
        for j in 0..m {
            if self.fractions.iter().map(|r| &r[j]).sum::<Rational>() != one {
                return Err(DivisibleError::InvalidAllocation(format!(
                    "fractions of chore {} do not sum to 1",
                    j + 1
                )));
            }
        }
        for i in 0..n {
            if self.size(i, instance) > *instance.budget(i) {
                return Err(DivisibleError::InvalidAllocation(format!(
                    "agent {} exceeds its budget",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Drops the trailing (fictional) chore column.
    pub fn strip_last_chore(&self) -> Self {
        let fractions = self
            .fractions
            .iter()
            .map(|r| r[..r.len().saturating_sub(1)].to_vec())
            .collect();
        Self { fractions }
    }
}

/// Appends the fictional chore: size `2n · max B`, zero disutility for all.
pub fn augment_instance(instance: &Instance) -> Result<Instance, ModelError> {
    let n = instance.num_agents();
    let max_budget = instance.budgets().iter().max().cloned().unwrap_or_else(Rational::zero);
    let mut chores: Vec<(Rational, Rational)> = instance
        .chores()
        .iter()
        .map(|c| (c.size.clone(), c.disutility.clone()))
        .collect();
    chores.push((int(2 * n as i64) * max_budget, Rational::zero()));
    let augmented = Instance::new(chores, instance.budgets().to_vec())?;
    match instance.disutility_matrix() {
        None => Ok(augmented),
        Some(matrix) => augmented.with_disutility_matrix(
            matrix
                .iter()
                .map(|row| row.iter().cloned().chain([Rational::zero()]).collect())
                .collect(),
        ),
    }
}

/// Per-agent chore orders, densest first; equal densities by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityOrdering {
    orders: Vec<Vec<usize>>,
}

impl DensityOrdering {
    pub fn new(instance: &Instance) -> Self {
        let orders = (0..instance.num_agents())
            .map(|i| {
                let mut order: Vec<usize> = (0..instance.num_chores()).collect();
                order.sort_by(|&a, &b| compare_density(instance, i, a, b));
                order
            })
            .collect();
        Self { orders }
    }

    pub fn order(&self, agent: usize) -> &[usize] {
        &self.orders[agent]
    }
}

fn compare_density(instance: &Instance, agent: usize, a: usize, b: usize) -> Ordering {
    let (ca, cb) = (instance.chore(a), instance.chore(b));
    let lhs = instance.agent_disutility(agent, a) * &cb.size;
    let rhs = instance.agent_disutility(agent, b) * &ca.size;
    rhs.cmp(&lhs).then(a.cmp(&b))
}

/// One-based thresholds, one per agent, each in `[1, m+2]` for `m` original chores.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TauVector(pub Vec<usize>);

impl TauVector {
    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn incremented(&self, k: usize) -> Self {
        let mut next = self.0.clone();
        next[k] += 1;
        Self(next)
    }

    pub fn dominates(&self, other: &TauVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl fmt::Display for TauVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Internal chores and the optional edge chore of one agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoreSets {
    pub internal: Vec<usize>,
    pub edge: Option<usize>,
}

impl ChoreSets {
    pub fn contains(&self, chore: usize) -> bool {
        self.edge == Some(chore) || self.internal.contains(&chore)
    }
}

pub fn internal_edge_sets(tau: &TauVector, ordering: &DensityOrdering) -> Vec<ChoreSets> {
    tau.0
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let order = ordering.order(i);
            ChoreSets {
                internal: order[..(t - 1).min(order.len())].to_vec(),
                edge: order.get(t - 1).copied(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpVariant {
    /// Budgets bind with equality.
    Lp1,
    /// Budgets relaxed to `≤`.
    Lp2,
}

/// Variable index of `z_{i,j}` in [`build_lp`] systems.
pub fn variable(agent: usize, chore: usize, num_chores: usize) -> usize {
    agent * num_chores + chore
}

/// The density-domination program for `tau` over an augmented instance.
pub fn build_lp(tau: &TauVector, variant: LpVariant, augmented: &Instance) -> LinearSystem {
    build_lp_with(tau, variant, augmented, &DensityOrdering::new(augmented))
}

fn build_lp_with(
    tau: &TauVector,
    variant: LpVariant,
    augmented: &Instance,
    ordering: &DensityOrdering,
) -> LinearSystem {
    let (n, m) = (augmented.num_agents(), augmented.num_chores());
    let z = |i: usize, j: usize| variable(i, j, m);
    let sets = internal_edge_sets(tau, ordering);
    let mut internal_any = vec![false; m];
    for s in &sets {
        for &j in &s.internal {
            internal_any[j] = true;
        }
    }
    let mut system = LinearSystem::new();
    for _ in 0..n * m {
        system.add_variable(Rational::zero(), Rational::one()).expect("unit box");
    }
    let one = Rational::one;
    let add = |system: &mut LinearSystem, terms: Vec<(usize, Rational)>, rel, rhs| {
        system.add_constraint(terms, rel, rhs).expect("indices in range");
    };
    for (i, s) in sets.iter().enumerate() {
        // (i) an owner of an internal chore holds no more of it than anyone else.
        for &j in &s.internal {
            for k in (0..n).filter(|&k| k != i) {
                add(&mut system, vec![(z(i, j), one()), (z(k, j), -one())], Relation::Le, Rational::zero());
            }
        }
        // (ii) budget.
        let terms = s
            .internal
            .iter()
            .chain(&s.edge)
            .map(|&j| (z(i, j), augmented.chore(j).size.clone()))
            .collect();
        let relation = match variant {
            LpVariant::Lp1 => Relation::Eq,
            LpVariant::Lp2 => Relation::Le,
        };
        add(&mut system, terms, relation, augmented.budget(i).clone());
        // (iv) nothing outside the agent's top chores.
        for j in (0..m).filter(|&j| !s.contains(j)) {
            add(&mut system, vec![(z(i, j), one())], Relation::Eq, Rational::zero());
        }
    }
    for j in 0..m {
        // (iii) internal chores fully assigned, (v) others at most once.
        let terms = (0..n).map(|i| (z(i, j), one())).collect();
        let relation = if internal_any[j] { Relation::Eq } else { Relation::Le };
        add(&mut system, terms, relation, one());
    }
    system
}

/// `τ` and the augmented allocation witnessing density domination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DDCertificate {
    pub tau: TauVector,
    pub allocation: FractionalAllocation,
}

#[derive(Debug, Clone)]
pub struct DivisibleOutcome {
    /// Allocation over the original chores.
    pub allocation: FractionalAllocation,
    pub certificate: DDCertificate,
    /// Number of `τ` increments.
    pub iterations: usize,
    /// `τ` at the top of every iteration, ending with the final vector.
    pub tau_trace: Vec<TauVector>,
}

pub fn solve_divisible(instance: &Instance) -> Result<DivisibleOutcome, DivisibleError> {
    let augmented = augment_instance(instance)?;
    let ordering = DensityOrdering::new(&augmented);
    let (n, m) = (augmented.num_agents(), augmented.num_chores());
    let mut tau = TauVector::ones(n);
    let mut tau_trace = vec![tau.clone()];
    let point = loop {
        if let FeasibilityResult::Feasible(point) =
            feasible(&build_lp_with(&tau, LpVariant::Lp1, &augmented, &ordering))
        {
            break point;
        }
        let next = (0..n)
            .map(|k| tau.incremented(k))
            .find(|t| {
                t.0.iter().all(|&v| v <= m + 1)
                    && feasible(&build_lp_with(t, LpVariant::Lp2, &augmented, &ordering)).is_feasible()
            })
            .ok_or_else(|| DivisibleError::InternalInvariantViolation(tau.clone()))?;
        tau = next;
        tau_trace.push(tau.clone());
    };
    let rows = (0..n)
        .map(|i| (0..m).map(|j| point[variable(i, j, m)].clone()).collect())
        .collect();
    let full = FractionalAllocation::from_agent_rows(rows, m);
    let certificate = DDCertificate { tau, allocation: full };
    if !verify_dd(&certificate, &augmented) {
        return Err(DivisibleError::InternalInvariantViolation(certificate.tau));
    }
    Ok(DivisibleOutcome {
        allocation: certificate.allocation.strip_last_chore(),
        iterations: tau_trace.len() - 1,
        certificate,
        tau_trace,
    })
}

/// Density-domination conditions for the certificate's `τ`: internal
/// fractions no larger than anyone else's, budgets tight over internal and
/// edge chores, internal chores fully assigned among agents.
pub fn verify_dd(cert: &DDCertificate, augmented: &Instance) -> bool {
    let (n, m) = (augmented.num_agents(), augmented.num_chores());
    let x = &cert.allocation;
    if cert.tau.0.len() != n || cert.tau.0.iter().any(|&t| t == 0 || t > m + 1) {
        return false;
    }
    if x.num_agents() != n || x.num_chores() != m {
        return false;
    }
    let sets = internal_edge_sets(&cert.tau, &DensityOrdering::new(augmented));
    for (i, s) in sets.iter().enumerate() {
        let dominated = s
            .internal
            .iter()
            .all(|&j| (0..n).all(|k| x.fraction(i, j) <= x.fraction(k, j)));
        let load: Rational = s
            .internal
            .iter()
            .chain(&s.edge)
            .map(|&j| x.fraction(i, j) * &augmented.chore(j).size)
            .sum();
        let covered = s
            .internal
            .iter()
            .all(|&j| (0..n).map(|k| x.fraction(k, j)).sum::<Rational>().is_one());
        if !dominated || load != *augmented.budget(i) || !covered {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalWitness {
    /// Envious row; `n` is the housekeeper.
    pub envier: usize,
    pub envied: usize,
    /// Best disutility of a budget-feasible part of the envier's bundle.
    pub best_part: Rational,
    /// The envied agent's own disutility, in the same measure.
    pub envied_bundle: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalEnvyReport {
    pub satisfied: bool,
    pub witness: Option<FractionalWitness>,
}

/// Maximum disutility (for `agent`) of `Y ≤ row` with `s(Y) ≤ budget`.
fn best_part(row: &[Rational], agent: usize, budget: &Rational, instance: &Instance) -> Rational {
    let mut held: Vec<usize> = (0..row.len()).filter(|&j| !row[j].is_zero()).collect();
    held.sort_by(|&a, &b| compare_density(instance, agent, a, b));
    let mut room = budget.clone();
    let mut total = Rational::zero();
    for j in held {
        if room.is_zero() {
            break;
        }
        let chore = instance.chore(j);
        let available = &row[j] * &chore.size;
        let take = if available <= room { row[j].clone() } else { &room / &chore.size };
        room -= &take * &chore.size;
        total += take * instance.agent_disutility(agent, j);
    }
    total
}

/// Fractional envy-freeness, including the housekeeper. Envy of the
/// housekeeper toward agent `j` is measured with `j`'s disutilities.
pub fn verify_ef_divisible(
    allocation: &FractionalAllocation,
    instance: &Instance,
) -> Result<FractionalEnvyReport, DivisibleError> {
    allocation.check(instance)?;
    let n = instance.num_agents();
    for envier in 0..=n {
        for envied in (0..n).filter(|&j| j != envier) {
            let measure = if envier == n { envied } else { envier };
            let best = best_part(allocation.row(envier), measure, instance.budget(envied), instance);
            let theirs = allocation.disutility(envied, measure, instance);
            if best > theirs {
                return Ok(FractionalEnvyReport {
                    satisfied: false,
                    witness: Some(FractionalWitness {
                        envier,
                        envied,
                        best_part: best,
                        envied_bundle: theirs,
                    }),
                });
            }
        }
    }
    Ok(FractionalEnvyReport {
        satisfied: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn fictional_chore_sizes() {
        let one = Instance::from_ints(&[(10, 5)], &[4]).unwrap();
        let aug = augment_instance(&one).unwrap();
        assert_eq!(aug.chore(1).size, int(8));
        assert!(aug.chore(1).density().is_zero());
        let three = Instance::from_ints(&[(1, 1)], &[3, 10, 7]).unwrap();
        assert_eq!(augment_instance(&three).unwrap().chore(1).size, int(60));
    }

    #[test]
    fn sets_at_extremes() {
        let inst = augment_instance(&Instance::from_ints(&[(2, 3)], &[4]).unwrap()).unwrap();
        let ord = DensityOrdering::new(&inst);
        assert_eq!(ord.order(0), &[0, 1]);
        let at = |t| internal_edge_sets(&TauVector(vec![t]), &ord).remove(0);
        assert_eq!(at(1), ChoreSets { internal: vec![], edge: Some(0) });
        assert_eq!(at(2), ChoreSets { internal: vec![0], edge: Some(1) });
        assert_eq!(at(3), ChoreSets { internal: vec![0, 1], edge: None });
    }

    #[test]
    fn relaxed_program_at_ones_admits_zero() {
        let inst = augment_instance(&Instance::from_ints(&[(3, 1), (2, 7)], &[4, 5]).unwrap()).unwrap();
        let lp = build_lp(&TauVector::ones(2), LpVariant::Lp2, &inst);
        assert!(lp.satisfied_by(&vec![Rational::zero(); lp.num_variables()]));
        let full = build_lp(&TauVector(vec![4, 1]), LpVariant::Lp2, &inst);
        assert!(!feasible(&full).is_feasible());
    }

    #[test]
    fn single_large_chore_split() {
        let inst = Instance::from_ints(&[(10, 5)], &[4]).unwrap();
        let out = solve_divisible(&inst).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.certificate.tau, TauVector(vec![1]));
        assert_eq!(out.allocation.fraction(0, 0), &ratio(2, 5));
        assert_eq!(out.allocation.housekeeper()[0], ratio(3, 5));
        assert!(verify_ef_divisible(&out.allocation, &inst).unwrap().satisfied);
    }

    #[test]
    fn small_chore_needs_one_increment() {
        let inst = Instance::from_ints(&[(2, 3)], &[4]).unwrap();
        let out = solve_divisible(&inst).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.certificate.tau, TauVector(vec![2]));
        assert_eq!(out.certificate.allocation.row(0), &[int(1), ratio(1, 4)]);
        assert_eq!(out.allocation.row(0), &[int(1)]);
    }

    #[test]
    fn no_chores() {
        let inst = Instance::from_ints(&[], &[3, 5]).unwrap();
        let out = solve_divisible(&inst).unwrap();
        assert_eq!(out.certificate.tau, TauVector::ones(2));
        assert_eq!(out.allocation.num_chores(), 0);
    }

    #[test]
    fn dd_conditions() {
        let inst = augment_instance(&Instance::from_ints(&[(10, 5)], &[4]).unwrap()).unwrap();
        let cert = |x: Rational| DDCertificate {
            tau: TauVector(vec![1]),
            allocation: FractionalAllocation::from_agent_rows(vec![vec![x, Rational::zero()]], 2),
        };
        assert!(verify_dd(&cert(ratio(2, 5)), &inst));
        assert!(!verify_dd(&cert(ratio(1, 5)), &inst));
        assert!(!verify_dd(&cert(Rational::zero()), &inst));
    }

    #[test]
    fn fractional_envy() {
        let inst = Instance::from_ints(&[(10, 5)], &[4]).unwrap();
        let all_kept = FractionalAllocation::initial(&inst);
        let two = Instance::from_ints(&[(10, 5)], &[4, 4]).unwrap();
        let report = verify_ef_divisible(&FractionalAllocation::initial(&two), &two).unwrap();
        assert!(!report.satisfied);
        assert_eq!(report.witness.unwrap().best_part, int(2));
        // One agent only: the housekeeper has nobody else to compare with but agent 1.
        assert!(!verify_ef_divisible(&all_kept, &inst).unwrap().satisfied);
        let zero = Instance::from_ints(&[(10, 0), (3, 0)], &[4, 2]).unwrap();
        assert!(verify_ef_divisible(&FractionalAllocation::initial(&zero), &zero).unwrap().satisfied);
    }

    #[test]
    fn subjective_matrix_is_augmented() {
        let inst = Instance::from_ints(&[(2, 1), (3, 1)], &[2, 3])
            .unwrap()
            .with_disutility_matrix(vec![vec![int(1), int(4)], vec![int(5), int(2)]])
            .unwrap();
        let aug = augment_instance(&inst).unwrap();
        assert_eq!(aug.agent_disutility(1, 2), &Rational::zero());
        assert_eq!(DensityOrdering::new(&aug).order(0), &[1, 0, 2]);
    }
}
