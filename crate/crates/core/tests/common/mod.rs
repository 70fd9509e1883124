//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use chorefair::lp::{LinearSystem, Relation};
use chorefair::rational::{int, Rational};
use chorefair::{Allocation, Bundle, EnvyCriterion, Instance};
use num_traits::Zero;
use rand::Rng;

/// Solves the square system `a x = b`; `None` when singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Feasibility by enumerating every vertex candidate: each choice of
/// `vars` hyperplanes among constraint rows and bound planes. The box keeps
/// the region bounded, so a non-empty region has a vertex.
pub fn vertex_feasible(system: &LinearSystem) -> bool {
    let v = system.num_variables();
    let mut planes: Vec<(Vec<Rational>, Rational)> = system
        .constraints()
        .iter()
        .map(|c| (c.coefficients.clone(), c.rhs.clone()))
        .collect();
    for j in 0..v {
        let unit: Vec<Rational> = (0..v).map(|k| if k == j { int(1) } else { int(0) }).collect();
        let (lo, hi) = system.bounds(j);
        planes.push((unit.clone(), lo.clone()));
        planes.push((unit, hi.clone()));
    }
    let mut choice: Vec<usize> = (0..v).collect();
    if v == 0 {
        return system.satisfied_by(&[]);
    }
    loop {
        let a = choice.iter().map(|&p| planes[p].0.clone()).collect();
        let b = choice.iter().map(|&p| planes[p].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if system.satisfied_by(&x) {
                return true;
            }
        }
        // Next combination in lexicographic order.
        let mut i = v;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if choice[i] < planes.len() - v + i {
                break;
            }
        }
        choice[i] += 1;
        for k in i + 1..v {
            choice[k] = choice[k - 1] + 1;
        }
    }
}

pub fn random_system(rng: &mut impl Rng) -> LinearSystem {
    let mut s = LinearSystem::new();
    let vars = rng.gen_range(1..=4);
    for _ in 0..vars {
        let lo = rng.gen_range(-2..=1);
        let hi = lo + rng.gen_range(0..=3);
        s.add_variable(int(lo), int(hi)).unwrap();
    }
    for _ in 0..rng.gen_range(0..=6) {
        let mut terms: Vec<(usize, Rational)> = Vec::new();
        for j in 0..vars {
            if rng.gen_bool(0.7) {
                terms.push((j, int(rng.gen_range(-3..=3))));
            }
        }
        let relation = [Relation::Le, Relation::Eq, Relation::Ge][rng.gen_range(0..3)];
        let rhs = Rational::new(rng.gen_range(-8..=8).into(), rng.gen_range(1..=2).into());
        s.add_constraint(terms, relation, rhs).unwrap();
    }
    s
}

/// All subsets of `bundle`, by bitmask.
pub fn subsets(bundle: &Bundle) -> impl Iterator<Item = Vec<usize>> + '_ {
    let ids = bundle.ids();
    (0u32..1 << ids.len()).map(move |mask| {
        (0..ids.len()).filter(|&b| mask & (1 << b) != 0).map(|b| ids[b]).collect()
    })
}

/// Definition-level verdict by enumerating every subset and every removal.
pub fn brute_force_verdict(allocation: &Allocation, criterion: EnvyCriterion, inst: &Instance) -> bool {
    let n = inst.num_agents();
    let d = |ids: &[usize]| -> Rational { ids.iter().map(|&c| inst.chore(c).disutility.clone()).sum() };
    let s = |ids: &[usize]| -> Rational { ids.iter().map(|&c| inst.chore(c).size.clone()).sum() };
    for i in 0..=n {
        for j in (0..n).filter(|&j| j != i) {
            let theirs = d(allocation.bundle(j).ids());
            for set in subsets(allocation.bundle(i)) {
                if s(&set) > *inst.budget(j) {
                    continue;
                }
                let ok = match criterion {
                    EnvyCriterion::Ef => d(&set) <= theirs,
                    // Some removal of min(k, |S|) chores suffices.
                    EnvyCriterion::Efk(k) => {
                        let removed = k.min(set.len());
                        subsets(&Bundle::new(set.clone()))
                            .filter(|r| r.len() == removed)
                            .any(|r| d(&set) - d(&r) <= theirs)
                    }
                    EnvyCriterion::Efx => set.iter().all(|&c| d(&set) - &inst.chore(c).disutility <= theirs),
                };
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// Allocation from `owners`, sending chores home (highest id first) until every agent fits.
pub fn repaired(owners: &[usize], inst: &Instance) -> Allocation {
    let n = inst.num_agents();
    let mut owners = owners.to_vec();
    for agent in 0..n {
        let mut load: Rational = (0..owners.len())
            .filter(|&c| owners[c] == agent)
            .map(|c| inst.chore(c).size.clone())
            .sum();
        for c in (0..owners.len()).rev() {
            if load <= *inst.budget(agent) {
                break;
            }
            if owners[c] == agent {
                load -= &inst.chore(c).size;
                owners[c] = n;
            }
        }
    }
    Allocation::from_owners(&owners, n)
}

/// Random feasible allocation.
pub fn random_allocation(inst: &Instance, rng: &mut impl Rng) -> Allocation {
    let n = inst.num_agents();
    let owners: Vec<usize> = (0..inst.num_chores()).map(|_| rng.gen_range(0..=n)).collect();
    repaired(&owners, inst)
}

/// Integer instance from `(size, disutility)` pairs and budgets.
pub fn instance(chores: &[(i64, i64)], budgets: &[i64]) -> Instance {
    Instance::from_ints(chores, budgets).unwrap()
}

pub mod strategies {
    use super::*;
    use proptest::prelude::*;

    pub fn instance(max_agents: usize, max_chores: usize) -> impl Strategy<Value = Instance> {
        (
            prop::collection::vec((1i64..=10, 0i64..=10), 0..=max_chores),
            prop::collection::vec(1i64..=15, 1..=max_agents),
        )
            .prop_map(|(chores, budgets)| Instance::from_ints(&chores, &budgets).unwrap())
    }

    pub fn instance_with_budgets(max_agents: usize, max_chores: usize, identical: bool) -> impl Strategy<Value = Instance> {
        (
            prop::collection::vec((1i64..=10, 0i64..=10), 0..=max_chores),
            prop::collection::vec(1i64..=15, 1..=max_agents),
        )
            .prop_map(move |(chores, mut budgets)| {
                if identical {
                    let b = budgets[0];
                    budgets.iter_mut().for_each(|x| *x = b);
                }
                Instance::from_ints(&chores, &budgets).unwrap()
            })
    }

    /// An instance with a feasible allocation drawn from random owners.
    pub fn allocated(max_agents: usize, max_chores: usize) -> impl Strategy<Value = (Instance, Allocation)> {
        instance(max_agents, max_chores).prop_flat_map(|inst| {
            let n = inst.num_agents();
            let m = inst.num_chores();
            prop::collection::vec(0..=n, m).prop_map(move |owners| {
                let alloc = repaired(&owners, &inst);
                (inst.clone(), alloc)
            })
        })
    }

    pub fn subjective(max_agents: usize, max_chores: usize) -> impl Strategy<Value = Instance> {
        instance(max_agents, max_chores).prop_flat_map(|inst| {
            let (n, m) = (inst.num_agents(), inst.num_chores());
            prop::collection::vec(prop::collection::vec(0i64..=10, m), n).prop_map(move |rows| {
                inst.clone()
                    .with_disutility_matrix(rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect())
                    .unwrap()
            })
        })
    }
}

