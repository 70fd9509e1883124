//! Instances, bundles and allocations.

use crate::rational::{self, Rational};
use num_traits::{Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("chore {chore} has non-positive size {size}")]
    NonPositiveSize { chore: usize, size: String },
    #[error("chore {chore} has negative disutility {disutility}")]
    NegativeDisutility { chore: usize, disutility: String },
    #[error("agent {agent} has non-positive budget {budget}")]
    NonPositiveBudget { agent: usize, budget: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("allocation is not a partition of the chores: {0}")]
    NotAPartition(String),
    #[error("agent {agent} exceeds its budget")]
    OverBudget { agent: usize },
}

/// A chore with an objective size and disutility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chore {
    pub id: usize,
    pub size: Rational,
    pub disutility: Rational,
}

impl Chore {
    pub fn density(&self) -> Rational {
        &self.disutility / &self.size
    }
}

/// Unvalidated instance data as read from an external format.
#[derive(Debug, Clone, Default)]
pub struct RawInstance {
    pub sizes: Vec<Rational>,
    pub disutilities: Vec<Rational>,
    pub budgets: Vec<Rational>,
    /// Optional agent-by-chore disutility matrix (divisible chores only).
    pub disutility_matrix: Option<Vec<Vec<Rational>>>,
}

/// A validated instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    chores: Vec<Chore>,
    budgets: Vec<Rational>,
    disutility_matrix: Option<Vec<Vec<Rational>>>,
}

impl Instance {
    pub fn new(
        chores: Vec<(Rational, Rational)>,
        budgets: Vec<Rational>,
    ) -> Result<Self, ModelError> {
        let (sizes, disutilities) = chores.into_iter().unzip();
        validate_instance(RawInstance {
            sizes,
            disutilities,
            budgets,
            disutility_matrix: None,
        })
    }

    /// Integer-valued shorthand: `chores` are `(size, disutility)` pairs.
    pub fn from_ints(chores: &[(i64, i64)], budgets: &[i64]) -> Result<Self, ModelError> {
        Self::new(
            chores
                .iter()
                .map(|&(s, d)| (rational::int(s), rational::int(d)))
                .collect(),
            budgets.iter().map(|&b| rational::int(b)).collect(),
        )
    }

    pub fn with_disutility_matrix(self, matrix: Vec<Vec<Rational>>) -> Result<Self, ModelError> {
        validate_instance(RawInstance {
            sizes: self.chores.iter().map(|c| c.size.clone()).collect(),
            disutilities: self.chores.iter().map(|c| c.disutility.clone()).collect(),
            budgets: self.budgets,
            disutility_matrix: Some(matrix),
        })
    }

    pub fn num_agents(&self) -> usize {
        self.budgets.len()
    }

    pub fn num_chores(&self) -> usize {
        self.chores.len()
    }

    pub fn chores(&self) -> &[Chore] {
        &self.chores
    }

    pub fn chore(&self, id: usize) -> &Chore {
        &self.chores[id]
    }

    pub fn budgets(&self) -> &[Rational] {
        &self.budgets
    }

    pub fn budget(&self, agent: usize) -> &Rational {
        &self.budgets[agent]
    }

    pub fn disutility_matrix(&self) -> Option<&[Vec<Rational>]> {
        self.disutility_matrix.as_deref()
    }

    /// Disutility of `chore` for `agent`: the matrix entry when present,
    /// otherwise the objective disutility.
    pub fn agent_disutility(&self, agent: usize, chore: usize) -> &Rational {
        match &self.disutility_matrix {
            Some(m) => &m[agent][chore],
            None => &self.chores[chore].disutility,
        }
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            sizes: self.chores.iter().map(|c| c.size.clone()).collect(),
            disutilities: self.chores.iter().map(|c| c.disutility.clone()).collect(),
            budgets: self.budgets.clone(),
            disutility_matrix: self.disutility_matrix.clone(),
        }
    }

    /// Same chores restricted to a different budget vector.
    pub fn with_budgets(&self, budgets: Vec<Rational>) -> Result<Self, ModelError> {
        let mut raw = self.to_raw();
        if budgets.len() != raw.budgets.len() {
            raw.disutility_matrix = None;
        }
        raw.budgets = budgets;
        validate_instance(raw)
    }

    pub fn total_size(&self) -> Rational {
        self.chores.iter().map(|c| &c.size).sum()
    }
}

/// Checks positivity of sizes and budgets, non-negativity of disutilities,
/// and the shape of the optional disutility matrix.
pub fn validate_instance(raw: RawInstance) -> Result<Instance, ModelError> {
    let RawInstance {
        sizes,
        disutilities,
        budgets,
        disutility_matrix,
    } = raw;
    if sizes.len() != disutilities.len() {
        return Err(ModelError::DimensionMismatch(format!(
            "{} sizes but {} disutilities",
            sizes.len(),
            disutilities.len()
        )));
    }
    if budgets.is_empty() {
        return Err(ModelError::DimensionMismatch("at least one agent is required".into()));
    }
    for (agent, b) in budgets.iter().enumerate() {
        if !b.is_positive() {
            return Err(ModelError::NonPositiveBudget {
                agent,
                budget: rational::format(b),
            });
        }
    }
    let mut chores = Vec::with_capacity(sizes.len());
    for (id, (size, disutility)) in sizes.into_iter().zip(disutilities).enumerate() {
        if !size.is_positive() {
            return Err(ModelError::NonPositiveSize {
                chore: id,
                size: rational::format(&size),
            });
        }
        if disutility.is_negative() {
            return Err(ModelError::NegativeDisutility {
                chore: id,
                disutility: rational::format(&disutility),
            });
        }
        chores.push(Chore {
            id,
            size,
            disutility,
        });
    }
    if let Some(matrix) = &disutility_matrix {
        if matrix.len() != budgets.len() {
            return Err(ModelError::DimensionMismatch(format!(
                "disutility matrix has {} rows for {} agents",
                matrix.len(),
                budgets.len()
            )));
        }
        for row in matrix {
            if row.len() != chores.len() {
                return Err(ModelError::DimensionMismatch(format!(
                    "disutility matrix row has {} entries for {} chores",
                    row.len(),
                    chores.len()
                )));
            }
            if let Some((chore, d)) = row.iter().enumerate().find(|(_, d)| d.is_negative()) {
                return Err(ModelError::NegativeDisutility {
                    chore,
                    disutility: rational::format(d),
                });
            }
        }
    }
    Ok(Instance {
        chores,
        budgets,
        disutility_matrix,
    })
}

/// A set of chore indices, kept sorted and duplicate-free.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle(Vec<usize>);

impl Bundle {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Bundle(ids)
    }

    pub fn empty() -> Self {
        Bundle(Vec::new())
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn insert(&mut self, id: usize) {
        if let Err(pos) = self.0.binary_search(&id) {
            self.0.insert(pos, id);
        }
    }

    pub fn remove(&mut self, id: usize) -> bool {
        match self.0.binary_search(&id) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn size(&self, instance: &Instance) -> Rational {
        self.iter().map(|c| &instance.chore(c).size).sum()
    }

    pub fn disutility(&self, instance: &Instance) -> Rational {
        self.iter().map(|c| &instance.chore(c).disutility).sum()
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Bundle::new(iter.into_iter().collect())
    }
}

impl fmt::Display for Bundle {
    /// One-based ids, as in the external formats.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, id) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "c{}", id + 1)?;
        }
        write!(f, "}}")
    }
}

/// Additive `(size, disutility)` of a bundle.
pub fn aggregate(bundle: &Bundle, instance: &Instance) -> (Rational, Rational) {
    bundle.iter().fold(
        (Rational::zero(), Rational::zero()),
        |(s, d), c| {
            let chore = instance.chore(c);
            (s + &chore.size, d + &chore.disutility)
        },
    )
}

pub fn density(chore: &Chore) -> Rational {
    chore.density()
}

/// `n` agent bundles followed by the housekeeper's bundle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn from_bundles(bundles: Vec<Bundle>) -> Self {
        assert!(!bundles.is_empty(), "an allocation needs a housekeeper bundle");
        Allocation { bundles }
    }

    /// Everything with the housekeeper.
    pub fn initial(instance: &Instance) -> Self {
        let mut bundles = vec![Bundle::empty(); instance.num_agents()];
        bundles.push((0..instance.num_chores()).collect());
        Allocation { bundles }
    }

    /// `owner[c]` is the bundle index of chore `c`; `n` is the housekeeper.
    pub fn from_owners(owner: &[usize], num_agents: usize) -> Self {
        let mut bundles = vec![Bundle::empty(); num_agents + 1];
        for (c, &o) in owner.iter().enumerate() {
            bundles[o].insert(c);
        }
        Allocation { bundles }
    }

    pub fn num_agents(&self) -> usize {
        self.bundles.len() - 1
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn bundle(&self, index: usize) -> &Bundle {
        &self.bundles[index]
    }

    pub fn agent_bundles(&self) -> &[Bundle] {
        &self.bundles[..self.num_agents()]
    }

    pub fn housekeeper(&self) -> &Bundle {
        &self.bundles[self.num_agents()]
    }

    pub(crate) fn bundles_mut(&mut self) -> &mut [Bundle] {
        &mut self.bundles
    }

    /// Every chore appears in exactly one bundle and there are `n + 1` bundles.
    pub fn check_partition(&self, instance: &Instance) -> Result<(), ModelError> {
        if self.bundles.len() != instance.num_agents() + 1 {
            return Err(ModelError::NotAPartition(format!(
                "{} bundles for {} agents plus housekeeper",
                self.bundles.len(),
                instance.num_agents()
            )));
        }
        let mut seen = vec![false; instance.num_chores()];
        for bundle in &self.bundles {
            for c in bundle.iter() {
                if c >= seen.len() {
                    return Err(ModelError::NotAPartition(format!("unknown chore index {c}")));
                }
                if std::mem::replace(&mut seen[c], true) {
                    return Err(ModelError::NotAPartition(format!("chore c{} assigned twice", c + 1)));
                }
            }
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            return Err(ModelError::NotAPartition(format!("chore c{} not assigned", c + 1)));
        }
        Ok(())
    }

    /// Partition plus budget feasibility.
    pub fn check(&self, instance: &Instance) -> Result<(), ModelError> {
        self.check_partition(instance)?;
        match (0..self.num_agents()).find(|&i| self.bundles[i].size(instance) > *instance.budget(i)) {
            Some(agent) => Err(ModelError::OverBudget { agent }),
            None => Ok(()),
        }
    }

    pub fn agent_disutilities(&self, instance: &Instance) -> Vec<Rational> {
        self.agent_bundles()
            .iter()
            .map(|b| b.disutility(instance))
            .collect()
    }
}

/// Every agent bundle fits its budget. The housekeeper has no budget.
pub fn is_feasible(allocation: &Allocation, instance: &Instance) -> bool {
    allocation
        .agent_bundles()
        .iter()
        .enumerate()
        .all(|(i, b)| b.size(instance) <= *instance.budget(i))
}
