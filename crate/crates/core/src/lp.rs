//! Exact rational linear feasibility.
//!
//! Systems have box-bounded variables and `<=`, `=`, `>=` rows. Feasibility
//! is decided by a phase-one simplex over rationals with Bland's rule after a
//! small presolve (empty and singleton rows become bound checks, fixed
//! variables are substituted out). Every returned point is rechecked
//! against the original system.

use crate::rational::Rational;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, point: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .zip(point)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, x)| a * x)
            .sum()
    }

    pub fn holds(&self, point: &[Rational]) -> bool {
        self.relation.holds(&self.lhs(point), &self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("variable {0} has an empty bound interval")]
    EmptyBounds(usize),
    #[error("coefficient refers to variable {index} but the system has {count}")]
    UnknownVariable { index: usize, count: usize },
}

/// Variables with bounds `[lo, hi]` and a list of linear rows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    lower: Vec<Rational>,
    upper: Vec<Rational>,
    constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, lo: Rational, hi: Rational) -> Result<usize, SystemError> {
        let index = self.lower.len();
        if lo > hi {
            return Err(SystemError::EmptyBounds(index));
        }
        self.lower.push(lo);
        self.upper.push(hi);
        for c in &mut self.constraints {
            c.coefficients.push(Rational::zero());
        }
        Ok(index)
    }

    /// Adds a row from sparse `(variable, coefficient)` terms; repeated
    /// variables are summed.
    pub fn add_constraint(
        &mut self,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<(), SystemError> {
        let count = self.lower.len();
        let mut coefficients = vec![Rational::zero(); count];
        for (index, a) in terms {
            if index >= count {
                return Err(SystemError::UnknownVariable { index, count });
            }
            coefficients[index] += a;
        }
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
        Ok(())
    }

    pub fn num_variables(&self) -> usize {
        self.lower.len()
    }

    pub fn bounds(&self, var: usize) -> (&Rational, &Rational) {
        (&self.lower[var], &self.upper[var])
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Exact check of bounds and rows at `point`.
    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        point.len() == self.num_variables()
            && point
                .iter()
                .enumerate()
                .all(|(j, x)| &self.lower[j] <= x && x <= &self.upper[j])
            && self.constraints.iter().all(|c| c.holds(point))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible(_))
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityResult::Feasible(p) => Some(p),
            FeasibilityResult::Infeasible => None,
        }
    }
}

/// Decides feasibility of `system`, returning a point when one exists.
pub fn feasible(system: &LinearSystem) -> FeasibilityResult {
    let result = match Presolved::new(system) {
        None => FeasibilityResult::Infeasible,
        Some(pre) => match phase_one(&pre) {
            None => FeasibilityResult::Infeasible,
            Some(reduced) => FeasibilityResult::Feasible(pre.expand(&reduced)),
        },
    };
    if let FeasibilityResult::Feasible(point) = &result {
        assert!(
            system.satisfied_by(point),
            "simplex returned a point violating the system"
        );
    }
    result
}

/// Rows over the free (non-fixed) variables after presolve.
struct Presolved {
    lower: Vec<Rational>,
    upper: Vec<Rational>,
    /// Original index of each free variable.
    free: Vec<usize>,
    rows: Vec<Constraint>,
}

impl Presolved {
    fn new(system: &LinearSystem) -> Option<Self> {
        let mut lower = system.lower.clone();
        let mut upper = system.upper.clone();
        let mut rows: Vec<Constraint> = system.constraints.clone();
        loop {
            let mut changed = false;
            let mut kept = Vec::with_capacity(rows.len());
            for row in rows {
                let mut nonzero = row.coefficients.iter().enumerate().filter(|(_, a)| !a.is_zero());
                match (nonzero.next(), nonzero.next()) {
                    (None, _) => {
                        if !row.relation.holds(&Rational::zero(), &row.rhs) {
                            return None;
                        }
                        changed = true;
                    }
                    (Some((j, a)), None) => {
                        let bound = &row.rhs / a;
                        let relation = if a.is_negative() { row.relation.flipped() } else { row.relation };
                        if matches!(relation, Relation::Le | Relation::Eq) && bound < upper[j] {
                            upper[j] = bound.clone();
                        }
                        if matches!(relation, Relation::Ge | Relation::Eq) && bound > lower[j] {
                            lower[j] = bound;
                        }
                        if lower[j] > upper[j] {
                            return None;
                        }
                        changed = true;
                    }
                    _ => kept.push(row),
                }
            }
            rows = kept;
            // Substitute variables whose bounds pin them.
            for row in &mut rows {
                for j in 0..row.coefficients.len() {
                    if lower[j] == upper[j] && !row.coefficients[j].is_zero() {
                        let a = std::mem::replace(&mut row.coefficients[j], Rational::zero());
                        row.rhs -= a * &lower[j];
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let free: Vec<usize> = (0..lower.len()).filter(|&j| lower[j] < upper[j]).collect();
        let rows = rows
            .into_iter()
            .map(|row| {
                // Shift every free variable to y = x - lo >= 0.
                let mut rhs = row.rhs;
                let coefficients = free
                    .iter()
                    .map(|&j| {
                        rhs -= &row.coefficients[j] * &lower[j];
                        row.coefficients[j].clone()
                    })
                    .collect();
                Constraint {
                    coefficients,
                    relation: row.relation,
                    rhs,
                }
            })
            .collect();
        Some(Presolved {
            lower,
            upper,
            free,
            rows,
        })
    }

    fn expand(&self, shifted: &[Rational]) -> Vec<Rational> {
        let mut point = self.lower.clone();
        for (k, &j) in self.free.iter().enumerate() {
            point[j] += &shifted[k];
        }
        point
    }
}

/// Dense phase-one tableau. Column layout: structural variables, then one
/// slack or surplus per inequality row, then artificials.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    cost: Vec<Rational>,
    objective: Rational,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = Rational::one() / &self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[row] *= &inv;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for (v, p) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        if !self.cost[col].is_zero() {
            let factor = self.cost[col].clone();
            for (v, p) in self.cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.objective -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }
}

/// Returns a point of the shifted system, or `None` when infeasible.
fn phase_one(pre: &Presolved) -> Option<Vec<Rational>> {
    let n = pre.free.len();
    // Structural rows plus upper bounds y_j <= hi - lo.
    let mut rows: Vec<Constraint> = pre.rows.clone();
    for (k, &j) in pre.free.iter().enumerate() {
        let mut coefficients = vec![Rational::zero(); n];
        coefficients[k] = Rational::one();
        rows.push(Constraint {
            coefficients,
            relation: Relation::Le,
            rhs: &pre.upper[j] - &pre.lower[j],
        });
    }
    for row in &mut rows {
        if row.rhs.is_negative() {
            for a in &mut row.coefficients {
                *a = -a.clone();
            }
            row.rhs = -row.rhs.clone();
            row.relation = row.relation.flipped();
        }
    }
    if rows.is_empty() {
        return Some(vec![Rational::zero(); n]);
    }
    let slacks = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let artificials = rows.iter().filter(|r| r.relation != Relation::Le).count();
    let width = n + slacks + artificials;
    let mut tableau = Tableau {
        rows: Vec::with_capacity(rows.len()),
        rhs: Vec::with_capacity(rows.len()),
        basis: Vec::with_capacity(rows.len()),
        cost: vec![Rational::zero(); width],
        objective: Rational::zero(),
    };
    let (mut next_slack, mut next_art) = (n, n + slacks);
    for row in rows {
        let mut line = row.coefficients;
        line.resize(width, Rational::zero());
        let basic = match row.relation {
            Relation::Le => {
                line[next_slack] = Rational::one();
                next_slack += 1;
                next_slack - 1
            }
            Relation::Ge => {
                line[next_slack] = -Rational::one();
                next_slack += 1;
                line[next_art] = Rational::one();
                next_art += 1;
                next_art - 1
            }
            Relation::Eq => {
                line[next_art] = Rational::one();
                next_art += 1;
                next_art - 1
            }
        };
        if basic >= n + slacks {
            // Reduced costs of minimizing the artificial sum.
            for (c, a) in tableau.cost.iter_mut().zip(&line).take(n + slacks) {
                *c -= a;
            }
            tableau.objective -= &row.rhs;
        }
        tableau.rows.push(line);
        tableau.rhs.push(row.rhs);
        tableau.basis.push(basic);
    }

    // Bland: lowest-index improving column, lowest-index basic variable on ratio ties.
    while let Some(col) = (0..width).find(|&j| tableau.cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for r in 0..tableau.rows.len() {
            let a = &tableau.rows[r][col];
            if !a.is_positive() {
                continue;
            }
            let ratio = &tableau.rhs[r] / a;
            let better = match &leave {
                None => true,
                Some((best_row, best)) => {
                    ratio < *best || (ratio == *best && tableau.basis[r] < tableau.basis[*best_row])
                }
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // Phase one is bounded below by zero, so some row always limits the step.
        let (row, _) = leave.expect("phase one objective is bounded");
        tableau.pivot(row, col);
    }
    if !tableau.objective.is_zero() {
        return None;
    }
    let mut point = vec![Rational::zero(); n];
    for (r, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            point[b] = tableau.rhs[r].clone();
        }
    }
    Some(point)
}
