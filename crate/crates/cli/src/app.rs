//! Subcommands and exit-code mapping.

use crate::format::{
    read_json, write_json, AllocationEntry, AllocationSource, BenchConfigFile, Certificate, Exact, GenConfigFile,
    InstanceFile, Metadata, ResultFile, WitnessEntry, VERSION,
};
use anyhow::{bail, Context, Result};
use chorefair::divisible::{solve_divisible, verify_ef_divisible, DivisibleError, FractionalAllocation};
use chorefair::fairness::{verify, KernelError};
use chorefair::harness::{generate, oracle_allocations, HarnessError};
use chorefair::solver::{classify_instance, densest_first, solve_efx_traced, solve_two_agents_traced};
use chorefair::{Allocation, EnvyCriterion, Instance};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTRACTABLE: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "chorefair", version, about = "Fair allocation of chores under budget constraints")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Allocate the chores of an instance.
    Solve {
        #[arg(long, value_enum, default_value_t = Algorithm::DensestFirst)]
        algorithm: Algorithm,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an allocation. Without --criterion, re-checks every recorded certificate.
    Verify {
        #[arg(long)]
        criterion: Option<EnvyCriterion>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
    },
    /// Write a random instance.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide by enumeration whether an allocation meeting the criterion exists.
    Oracle {
        #[arg(long)]
        criterion: EnvyCriterion,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Time the solvers on generated instances.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Efx,
    DensestFirst,
    TwoAgent,
    Divisible,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Efx => "efx",
            Algorithm::DensestFirst => "densest-first",
            Algorithm::TwoAgent => "two-agent",
            Algorithm::Divisible => "divisible",
        }
    }
}

const REPORTED: [EnvyCriterion; 4] = [EnvyCriterion::Ef, EnvyCriterion::Efx, EnvyCriterion::EF1, EnvyCriterion::EF2];

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(error: &anyhow::Error) -> u8 {
    for cause in error.chain() {
        if cause.downcast_ref::<KernelError>().is_some()
            || matches!(cause.downcast_ref::<HarnessError>(), Some(HarnessError::OracleTooLarge { .. }))
        {
            return EXIT_INTRACTABLE;
        }
        if matches!(
            cause.downcast_ref::<DivisibleError>(),
            Some(DivisibleError::InternalInvariantViolation(_))
        ) {
            return EXIT_INTERNAL;
        }
    }
    EXIT_USAGE
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve { algorithm, input, out } => {
            let instance = load_instance(&input)?;
            let result = solve(algorithm, &instance)?;
            write_json(&out, &result)?;
            for cert in &result.certificates {
                println!("{}: {}", cert.criterion, if cert.satisfied { "satisfied" } else { "violated" });
            }
            Ok(EXIT_OK)
        }
        Command::Verify { criterion, input, allocation } => {
            let instance = load_instance(&input)?;
            let source: AllocationSource = read_json(&allocation)?;
            source.check_version()?;
            match criterion {
                Some(c) => {
                    let cert = certify(c, source.allocation(), &instance)?;
                    report(&cert, instance.num_agents());
                    Ok(if cert.satisfied { EXIT_OK } else { EXIT_VIOLATED })
                }
                None => reverify(&source, &instance),
            }
        }
        Command::Gen { seed, config, out } => {
            let file: GenConfigFile = match config {
                Some(path) => read_json(&path)?,
                None => GenConfigFile::default(),
            };
            let instance = generate(&file.to_config(seed)?)?;
            write_json(&out, &InstanceFile::from_instance(&instance, file.divisible))?;
            Ok(EXIT_OK)
        }
        Command::Oracle { criterion, input } => {
            let instance = load_instance(&input)?;
            let found = oracle_allocations(&instance, criterion)?;
            match found.first() {
                Some(first) => {
                    println!("{criterion}: {} allocations, e.g. {}", found.len(), describe_allocation(first));
                    Ok(EXIT_OK)
                }
                None => {
                    println!("{criterion}: no allocation exists");
                    Ok(EXIT_VIOLATED)
                }
            }
        }
        Command::Bench { config } => {
            let file: BenchConfigFile = match config {
                Some(path) => read_json(&path)?,
                None => BenchConfigFile::default(),
            };
            bench(&file)?;
            Ok(EXIT_OK)
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let file: InstanceFile = read_json(path)?;
    file.to_instance().with_context(|| format!("validating {}", path.display()))
}

fn describe_allocation(allocation: &Allocation) -> String {
    let mut parts: Vec<String> = allocation
        .agent_bundles()
        .iter()
        .enumerate()
        .map(|(i, b)| format!("agent {}: {b}", i + 1))
        .collect();
    parts.push(format!("housekeeper: {}", allocation.housekeeper()));
    parts.join(", ")
}

fn party(index: usize, n: usize) -> String {
    if index == n {
        "the housekeeper".to_string()
    } else {
        format!("agent {}", index + 1)
    }
}

fn report(cert: &Certificate, n: usize) {
    match &cert.witness {
        None => println!("{}: satisfied", cert.criterion),
        Some(w) => {
            let who = party(w.envier - 1, n);
            let whom = party(w.envied - 1, n);
            match (&w.subset, &w.best_part, &w.envied_bundle) {
                (Some(subset), _, _) => {
                    let ids: Vec<String> = subset.iter().map(|c| format!("c{c}")).collect();
                    println!("{}: violated, {who} envies {whom} via {{{}}}", cert.criterion, ids.join(", "));
                }
                (None, Some(best), Some(theirs)) => println!(
                    "{}: violated, {who} envies {whom} ({} > {})",
                    cert.criterion,
                    chorefair::rational::format(&best.0),
                    chorefair::rational::format(&theirs.0)
                ),
                _ => println!("{}: violated, {who} envies {whom}", cert.criterion),
            }
        }
    }
}

fn indivisible_certificate(criterion: EnvyCriterion, allocation: &Allocation, instance: &Instance) -> Result<Certificate> {
    let r = verify(allocation, criterion, instance)?;
    Ok(Certificate {
        criterion: criterion.to_string(),
        satisfied: r.satisfied,
        witness: r.witness.map(|w| WitnessEntry {
            envier: w.envier + 1,
            envied: w.envied + 1,
            subset: Some(w.subset.iter().map(|c| c + 1).collect()),
            best_part: None,
            envied_bundle: None,
        }),
    })
}

fn fractional_certificate(allocation: &FractionalAllocation, instance: &Instance) -> Result<Certificate> {
    let r = verify_ef_divisible(allocation, instance)?;
    Ok(Certificate {
        criterion: EnvyCriterion::Ef.to_string(),
        satisfied: r.satisfied,
        witness: r.witness.map(|w| WitnessEntry {
            envier: w.envier + 1,
            envied: w.envied + 1,
            subset: None,
            best_part: Some(Exact(w.best_part)),
            envied_bundle: Some(Exact(w.envied_bundle)),
        }),
    })
}

fn certify(criterion: EnvyCriterion, entry: &AllocationEntry, instance: &Instance) -> Result<Certificate> {
    match entry {
        AllocationEntry::Bundles { .. } => indivisible_certificate(criterion, &entry.to_allocation(instance)?, instance),
        AllocationEntry::Fractions { .. } => {
            if criterion != EnvyCriterion::Ef {
                bail!("fractional allocations are checked for ef only, not {criterion}");
            }
            fractional_certificate(&entry.to_fractions()?, instance)
        }
    }
}

fn reverify(source: &AllocationSource, instance: &Instance) -> Result<u8> {
    let AllocationSource::Result(result) = source else {
        bail!("--criterion is required for a bare allocation");
    };
    let mut code = EXIT_OK;
    for recorded in &result.certificates {
        let criterion: EnvyCriterion = recorded.criterion.parse()?;
        let fresh = certify(criterion, &result.allocation, instance)?;
        report(&fresh, instance.num_agents());
        if &fresh != recorded {
            println!("{}: recorded certificate does not match", recorded.criterion);
            code = EXIT_VIOLATED;
        }
    }
    Ok(code)
}

fn solve(algorithm: Algorithm, instance: &Instance) -> Result<ResultFile> {
    let (flags, classified) = classify_instance(instance);
    if algorithm != Algorithm::Divisible && instance.disutility_matrix().is_some() {
        bail!("a disutility matrix is only supported by the divisible algorithm");
    }
    let start = Instant::now();
    let (entry, iterations, guaranteed, tau) = match algorithm {
        Algorithm::DensestFirst => {
            let out = densest_first(instance, None, None);
            (AllocationEntry::from_allocation(&out.allocation), out.iterations, classified, None)
        }
        Algorithm::Efx => {
            let out = solve_efx_traced(instance)?;
            (AllocationEntry::from_allocation(&out.allocation), out.iterations, EnvyCriterion::Efx, None)
        }
        Algorithm::TwoAgent => {
            let out = solve_two_agents_traced(instance)?;
            (AllocationEntry::from_allocation(&out.allocation), out.iterations, EnvyCriterion::EF1, None)
        }
        Algorithm::Divisible => {
            let out = solve_divisible(instance)?;
            (
                AllocationEntry::from_fractions(&out.allocation),
                out.iterations,
                EnvyCriterion::Ef,
                Some(out.certificate.tau.0),
            )
        }
    };
    let elapsed_micros = u64::try_from(start.elapsed().as_micros()).unwrap_or(u64::MAX);
    let certificates = match &entry {
        AllocationEntry::Fractions { .. } => vec![certify(EnvyCriterion::Ef, &entry, instance)?],
        AllocationEntry::Bundles { .. } => {
            let mut criteria = REPORTED.to_vec();
            if !criteria.contains(&guaranteed) {
                criteria.push(guaranteed);
            }
            criteria
                .into_iter()
                .map(|c| certify(c, &entry, instance))
                .collect::<Result<_>>()?
        }
    };
    Ok(ResultFile {
        version: VERSION,
        allocation: entry,
        certificates,
        metadata: Metadata {
            algorithm: algorithm.name().to_string(),
            iterations,
            elapsed_micros,
            guaranteed: guaranteed.to_string(),
            special_cases: flags.iter().map(ToString::to_string).collect(),
            tau,
        },
    })
}

#[derive(Debug, Serialize)]
struct BenchRow {
    algorithm: String,
    instances: u64,
    solved: u64,
    guarantee_met: u64,
    mean_micros: u64,
    max_micros: u64,
}

fn bench(config: &BenchConfigFile) -> Result<()> {
    let algorithms = config
        .algorithms
        .iter()
        .map(|name| Algorithm::from_str(name, false).map_err(anyhow::Error::msg))
        .collect::<Result<Vec<_>>>()?;
    let instances = (0..config.instances)
        .map(|k| generate(&config.generator.to_config(config.seed.wrapping_add(k))?).map_err(Into::into))
        .collect::<Result<Vec<_>>>()?;
    for algorithm in algorithms {
        let mut row = BenchRow {
            algorithm: algorithm.name().to_string(),
            instances: config.instances,
            solved: 0,
            guarantee_met: 0,
            mean_micros: 0,
            max_micros: 0,
        };
        let mut total = 0u64;
        for instance in &instances {
            if algorithm == Algorithm::TwoAgent && instance.num_agents() != 2 {
                continue;
            }
            let Ok(result) = solve(algorithm, instance) else { continue };
            row.solved += 1;
            total += result.metadata.elapsed_micros;
            row.max_micros = row.max_micros.max(result.metadata.elapsed_micros);
            if result
                .certificates
                .iter()
                .any(|c| c.criterion == result.metadata.guaranteed && c.satisfied)
            {
                row.guarantee_met += 1;
            }
        }
        row.mean_micros = total.checked_div(row.solved).unwrap_or(0);
        println!("{}", serde_json::to_string(&row)?);
    }
    Ok(())
}
