//! Acceptance battery: one PASS/FAIL line per criterion.
//!
//! Every check is exact (rational arithmetic, zero tolerated failures).
//! Criteria 3 and 4 are known to fail for the algorithms as written; the
//! pinned instances live in `tests/counterexamples.rs`. The process exits
//! non-zero only if some other criterion fails.

mod common;

use chorefair::divisible::{augment_instance, solve_divisible, verify_dd, verify_ef_divisible};
use chorefair::fairness::{ef_count, fractional_ef_count, prefix_by_count, prefix_by_size, verify};
use chorefair::harness::{enumerate_allocations, generate, oracle_allocations, oracle_exists, GeneratorConfig};
use chorefair::lp::feasible;
use chorefair::rational::Rational;
use chorefair::solver::{densest_first, solve_efx, solve_two_agents, SpecialCase};
use chorefair::{Bundle, EnvyCriterion, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;
use std::time::Instant;

const CORPUS: u64 = 1000;
const PER_FLAG: u64 = 500;
const DIVISIBLE: u64 = 500;
const ORACLE: u64 = 200;
const LEMMA_PAIRS: usize = 1000;
const HIERARCHY: u64 = 1000;
const LP_SYSTEMS: u64 = 500;
const KNOWN_GAPS: [u32; 2] = [3, 4];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: usize, detail: String) -> Outcome {
    Outcome {
        passed: failures == 0,
        detail,
    }
}

fn corpus(seed: u64) -> Instance {
    generate(&GeneratorConfig::default().with_seed(seed)).unwrap()
}

fn efx_soundness() -> Outcome {
    let failures = (0..CORPUS)
        .filter(|&seed| {
            let inst = corpus(seed);
            let alloc = solve_efx(&inst).unwrap();
            !verify(&alloc, EnvyCriterion::Efx, &inst).unwrap().satisfied
        })
        .count();
    outcome(failures, format!("{failures}/{CORPUS} EFX failures"))
}

fn ef2_soundness() -> Outcome {
    let (mut ef2, mut loops) = (0, 0);
    for seed in 0..CORPUS {
        let inst = corpus(seed);
        let out = densest_first(&inst, None, None);
        ef2 += usize::from(!verify(&out.allocation, EnvyCriterion::EF2, &inst).unwrap().satisfied);
        loops += usize::from(out.iterations > inst.num_agents() + inst.num_chores());
    }
    outcome(ef2 + loops, format!("{ef2}/{CORPUS} EF2 failures, {loops} runs over n+m iterations"))
}

fn special_case_ef1() -> Outcome {
    let flags = [
        SpecialCase::IdenticallyValued,
        SpecialCase::BinaryDisutility,
        SpecialCase::IdenticallySized,
        SpecialCase::IdenticallyDense,
        SpecialCase::IdenticalBudgets,
        SpecialCase::TwoAgents,
    ];
    let mut total = 0;
    let mut parts = Vec::new();
    for flag in flags {
        let failures = (0..PER_FLAG)
            .filter(|&seed| {
                let config = GeneratorConfig {
                    special_case: Some(flag),
                    ..GeneratorConfig::default().with_seed(seed)
                };
                let inst = generate(&config).unwrap();
                let alloc = match flag {
                    SpecialCase::TwoAgents => solve_two_agents(&inst).unwrap(),
                    _ => densest_first(&inst, None, None).allocation,
                };
                !verify(&alloc, EnvyCriterion::EF1, &inst).unwrap().satisfied
            })
            .count();
        total += failures;
        parts.push(format!("{flag} {failures}/{PER_FLAG}"));
    }
    outcome(total, format!("EF1 failures: {}", parts.join(", ")))
}

fn divisible_correctness() -> Outcome {
    let (mut errors, mut dd, mut ef, mut loops) = (0, 0, 0, 0);
    for seed in 0..DIVISIBLE {
        let config = GeneratorConfig {
            agents: (1, 4),
            chores: (0, 7),
            subjective: seed % 2 == 1,
            ..GeneratorConfig::default().with_seed(seed)
        };
        let inst = generate(&config).unwrap();
        let aug = augment_instance(&inst).unwrap();
        match solve_divisible(&inst) {
            Err(_) => errors += 1,
            Ok(out) => {
                dd += usize::from(!verify_dd(&out.certificate, &aug));
                ef += usize::from(!verify_ef_divisible(&out.allocation, &inst).unwrap().satisfied);
                loops += usize::from(out.iterations > inst.num_agents() * (inst.num_chores() + 1));
            }
        }
    }
    outcome(
        errors + dd + ef + loops,
        format!(
            "of {DIVISIBLE} (half subjective): {errors} invariant errors, {dd} DD failures, {ef} EF failures, {loops} over n(m+1) iterations"
        ),
    )
}

fn oracle_cross_checks() -> Outcome {
    let criteria = [EnvyCriterion::Ef, EnvyCriterion::EF1, EnvyCriterion::EF2, EnvyCriterion::Efx];
    let (mut missing, mut solver_outside, mut disagreements, mut checked) = (0, 0, 0, 0);
    for seed in 0..ORACLE {
        let config = GeneratorConfig {
            agents: (1, 2),
            chores: (0, 6),
            ..GeneratorConfig::default().with_seed(seed)
        };
        let inst = generate(&config).unwrap();
        missing += usize::from(!oracle_exists(&inst, EnvyCriterion::Efx).unwrap());
        let efx = oracle_allocations(&inst, EnvyCriterion::Efx).unwrap();
        solver_outside += usize::from(!efx.contains(&solve_efx(&inst).unwrap()));
        for alloc in enumerate_allocations(&inst).unwrap() {
            for criterion in criteria {
                checked += 1;
                let fast = verify(&alloc, criterion, &inst).unwrap().satisfied;
                disagreements += usize::from(fast != common::brute_force_verdict(&alloc, criterion, &inst));
            }
        }
    }
    outcome(
        missing + solver_outside + disagreements,
        format!(
            "{missing}/{ORACLE} without EFX, {solver_outside} solver outputs outside the oracle set, {disagreements}/{checked} verdict disagreements"
        ),
    )
}

fn random_pair(rng: &mut ChaCha8Rng) -> (Instance, Bundle, Bundle) {
    let m = rng.gen_range(1..=9);
    let chores: Vec<(i64, i64)> = (0..m).map(|_| (rng.gen_range(1..=10), rng.gen_range(0..=10))).collect();
    let inst = common::instance(&chores, &[1]);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for c in 0..m {
        match rng.gen_range(0..3) {
            0 => x.push(c),
            1 => y.push(c),
            _ => {}
        }
    }
    (inst, Bundle::new(x), Bundle::new(y))
}

fn random_threshold(rng: &mut ChaCha8Rng, cap: &Rational) -> Rational {
    let den: i64 = rng.gen_range(1..=4);
    let top = (cap * Rational::from_integer(den.into())).to_integer();
    let top: i64 = top.try_into().unwrap_or(0);
    Rational::new(rng.gen_range(0..=top + 1).into(), den.into())
}

fn lemma_battery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h = |b: &Bundle, t: usize, inst: &Instance| prefix_by_count(b, t, inst).unwrap().size(inst);
    let count_at = |x: &Bundle, y: &Bundle, at: &Rational, inst: &Instance| {
        fractional_ef_count(&prefix_by_size(x, at, inst), &prefix_by_size(y, at, inst), inst)
    };

    let mut first = 0;
    let mut tested = 0;
    while tested < LEMMA_PAIRS {
        let (inst, x, y) = random_pair(&mut rng);
        if x.is_empty() {
            continue;
        }
        tested += 1;
        let ok = (0..x.len()).all(|i| {
            count_at(&x, &y, &h(&x, i + 1, &inst), &inst) <= count_at(&x, &y, &h(&x, i, &inst), &inst) + 1
        });
        first += usize::from(!ok);
    }

    let mut second = 0;
    let mut tested = 0;
    while tested < LEMMA_PAIRS {
        let (inst, x, y) = random_pair(&mut rng);
        if ef_count(&x, &y, &inst) < 2 {
            continue;
        }
        tested += 1;
        let ok = (0..=x.len()).any(|t| count_at(&x, &y, &h(&x, t, &inst), &inst) == 2);
        second += usize::from(!ok);
    }

    let mut third = 0;
    let mut tested = 0;
    while tested < LEMMA_PAIRS {
        let (inst, z, y) = random_pair(&mut rng);
        let t_hat = random_threshold(&mut rng, &z.size(&inst));
        let t = random_threshold(&mut rng, &y.size(&inst));
        let (zp, yp) = (prefix_by_size(&z, &t_hat, &inst), prefix_by_size(&y, &t, &inst));
        let ell = fractional_ef_count(&zp, &yp, &inst);
        let rest_z = z.disutility(&inst) - zp.disutility(&inst);
        let rest_y = y.disutility(&inst) - yp.disutility(&inst);
        if ell == 0 || rest_z > rest_y {
            continue;
        }
        tested += 1;
        third += usize::from(ef_count(&z, &y, &inst) > ell);
    }

    outcome(
        first + second + third,
        format!(
            "failures over {LEMMA_PAIRS} pairs each: increment {first}, exactly-two {second}, added-disutility {third}"
        ),
    )
}

fn hierarchy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut broken, mut ef, mut efx, mut ef1, mut ef2) = (0, 0, 0, 0, 0);
    for seed in 0..HIERARCHY {
        let inst = corpus(10_000 + seed);
        // Mix solver outputs in so the stronger verdicts actually occur.
        let alloc = match seed % 3 {
            0 => common::random_allocation(&inst, &mut rng),
            1 => solve_efx(&inst).unwrap(),
            _ => densest_first(&inst, None, None).allocation,
        };
        let ok = |c| verify(&alloc, c, &inst).unwrap().satisfied;
        let v = [ok(EnvyCriterion::Ef), ok(EnvyCriterion::Efx), ok(EnvyCriterion::EF1), ok(EnvyCriterion::EF2)];
        broken += usize::from(v.windows(2).any(|w| w[0] && !w[1]));
        for (count, flag) in [&mut ef, &mut efx, &mut ef1, &mut ef2].into_iter().zip(v) {
            *count += usize::from(flag);
        }
    }
    outcome(
        broken,
        format!("{broken}/{HIERARCHY} chain violations (EF {ef}, EFX {efx}, EF1 {ef1}, EF2 {ef2} satisfied)"),
    )
}

fn lp_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut disagree, mut unsound, mut feasible_count) = (0, 0, 0);
    for _ in 0..LP_SYSTEMS {
        let system = common::random_system(&mut rng);
        let result = feasible(&system);
        feasible_count += usize::from(result.is_feasible());
        disagree += usize::from(result.is_feasible() != common::vertex_feasible(&system));
        if let Some(point) = result.point() {
            unsound += usize::from(!system.satisfied_by(point));
        }
    }
    outcome(
        disagree + unsound,
        format!("{disagree}/{LP_SYSTEMS} verdict disagreements, {unsound} unsound points ({feasible_count} feasible)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "EFX soundness", efx_soundness),
        (2, "EF2 soundness and loop bound", ef2_soundness),
        (3, "EF1 on special cases", special_case_ef1),
        (4, "divisible correctness", divisible_correctness),
        (5, "oracle cross-checks", oracle_cross_checks),
        (6, "EFCount lemma battery", lemma_battery),
        (7, "verifier hierarchy", hierarchy),
        (8, "LP vs vertex enumeration", lp_agreement),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if result.passed { "PASS" } else { "FAIL" };
        let note = if !result.passed && KNOWN_GAPS.contains(&id) {
            " [known gap, see counterexamples.rs]"
        } else {
            ""
        };
        println!("criterion {id} ({name}): {verdict} - {}; tolerance exact{note} ({secs:.1}s)", result.detail);
        if !result.passed && !KNOWN_GAPS.contains(&id) {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
