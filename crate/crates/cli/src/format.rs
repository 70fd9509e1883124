//! Versioned JSON files for instances, generator settings and results.
//!
//! Numbers are exact: JSON integers, decimal strings ("2.5") and fraction
//! strings ("5/2") are accepted; JSON floats are rejected. Rationals are
//! always written back as strings. Chore and agent ids are 1-based.

use anyhow::{bail, ensure, Context, Result};
use chorefair::divisible::FractionalAllocation;
use chorefair::harness::GeneratorConfig;
use chorefair::rational::{self, Rational};
use chorefair::solver::SpecialCase;
use chorefair::{Allocation, Bundle, Instance};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExactVisitor;

        impl Visitor<'_> for ExactVisitor {
            type Value = Exact;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer, a decimal string or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
                Ok(Exact(rational::int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
                Ok(Exact(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exact, E> {
                Err(E::custom(format!(
                    "floating-point number {v} is not exact; write it as a string such as \"{v}\""
                )))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
                rational::parse(v).map(Exact).map_err(E::custom)
            }
        }

        d.deserialize_any(ExactVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub name: String,
    pub budget: Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoreEntry {
    pub name: String,
    pub size: Exact,
    pub disutility: Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub agents: Vec<AgentEntry>,
    pub chores: Vec<ChoreEntry>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub divisible: bool,
    /// Rows per agent, columns per chore.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disutility_matrix: Option<Vec<Vec<Exact>>>,
}

fn check_version(version: u32) -> Result<()> {
    ensure!(version == VERSION, "unsupported version {version}, expected {VERSION}");
    Ok(())
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance, divisible: bool) -> Self {
        let exact = |r: &Rational| Exact(r.clone());
        InstanceFile {
            version: VERSION,
            agents: instance
                .budgets()
                .iter()
                .enumerate()
                .map(|(i, b)| AgentEntry {
                    name: format!("agent{}", i + 1),
                    budget: exact(b),
                })
                .collect(),
            chores: instance
                .chores()
                .iter()
                .map(|c| ChoreEntry {
                    name: format!("chore{}", c.id + 1),
                    size: exact(&c.size),
                    disutility: exact(&c.disutility),
                })
                .collect(),
            divisible: divisible || instance.disutility_matrix().is_some(),
            disutility_matrix: instance
                .disutility_matrix()
                .map(|m| m.iter().map(|row| row.iter().map(exact).collect()).collect()),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        check_version(self.version)?;
        let instance = Instance::new(
            self.chores
                .iter()
                .map(|c| (c.size.0.clone(), c.disutility.0.clone()))
                .collect(),
            self.agents.iter().map(|a| a.budget.0.clone()).collect(),
        )?;
        Ok(match &self.disutility_matrix {
            None => instance,
            Some(m) => {
                instance.with_disutility_matrix(m.iter().map(|row| row.iter().map(|x| x.0.clone()).collect()).collect())?
            }
        })
    }
}

/// Either per-agent chore lists or a fraction matrix (last row: housekeeper).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AllocationEntry {
    Bundles {
        agents: Vec<Vec<usize>>,
        housekeeper: Vec<usize>,
    },
    Fractions {
        fractions: Vec<Vec<Exact>>,
    },
}

fn one_based(bundle: &Bundle) -> Vec<usize> {
    bundle.iter().map(|c| c + 1).collect()
}

fn zero_based(ids: &[usize], num_chores: usize) -> Result<Bundle> {
    ids.iter()
        .map(|&id| {
            ensure!(
                (1..=num_chores).contains(&id),
                "chore id {id} is outside 1..={num_chores}"
            );
            Ok(id - 1)
        })
        .collect::<Result<Vec<_>>>()
        .map(Bundle::new)
}

impl AllocationEntry {
    pub fn from_allocation(allocation: &Allocation) -> Self {
        AllocationEntry::Bundles {
            agents: allocation.agent_bundles().iter().map(one_based).collect(),
            housekeeper: one_based(allocation.housekeeper()),
        }
    }

    pub fn from_fractions(allocation: &FractionalAllocation) -> Self {
        AllocationEntry::Fractions {
            fractions: allocation
                .rows()
                .iter()
                .map(|r| r.iter().map(|x| Exact(x.clone())).collect())
                .collect(),
        }
    }

    pub fn to_allocation(&self, instance: &Instance) -> Result<Allocation> {
        let AllocationEntry::Bundles { agents, housekeeper } = self else {
            bail!("expected per-agent chore lists, found a fraction matrix");
        };
        ensure!(
            agents.len() == instance.num_agents(),
            "allocation lists {} agents, instance has {}",
            agents.len(),
            instance.num_agents()
        );
        let m = instance.num_chores();
        let mut bundles = agents
            .iter()
            .map(|ids| zero_based(ids, m))
            .collect::<Result<Vec<_>>>()?;
        bundles.push(zero_based(housekeeper, m)?);
        Ok(Allocation::from_bundles(bundles))
    }

    pub fn to_fractions(&self) -> Result<FractionalAllocation> {
        let AllocationEntry::Fractions { fractions } = self else {
            bail!("expected a fraction matrix, found per-agent chore lists");
        };
        Ok(FractionalAllocation::new(
            fractions.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessEntry {
    /// 1-based; `n + 1` is the housekeeper.
    pub envier: usize,
    pub envied: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_part: Option<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envied_bundle: Option<Exact>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub criterion: String,
    pub satisfied: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub algorithm: String,
    pub iterations: usize,
    pub elapsed_micros: u64,
    pub guaranteed: String,
    #[serde(default)]
    pub special_cases: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub version: u32,
    pub allocation: AllocationEntry,
    pub certificates: Vec<Certificate>,
    pub metadata: Metadata,
}

/// `--allocation` accepts a full result file or a bare allocation object.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AllocationSource {
    Result(Box<ResultFile>),
    Bare(AllocationEntry),
}

impl AllocationSource {
    pub fn allocation(&self) -> &AllocationEntry {
        match self {
            AllocationSource::Result(r) => &r.allocation,
            AllocationSource::Bare(a) => a,
        }
    }

    pub fn check_version(&self) -> Result<()> {
        match self {
            AllocationSource::Result(r) => check_version(r.version),
            AllocationSource::Bare(_) => Ok(()),
        }
    }
}

/// Generator settings; every field is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfigFile {
    pub agents: (usize, usize),
    pub chores: (usize, usize),
    pub sizes: (i64, i64),
    pub disutilities: (i64, i64),
    pub budgets: (i64, i64),
    pub denominator: i64,
    pub special_case: Option<String>,
    pub subjective: bool,
    pub divisible: bool,
}

impl Default for GenConfigFile {
    fn default() -> Self {
        let d = GeneratorConfig::default();
        GenConfigFile {
            agents: d.agents,
            chores: d.chores,
            sizes: d.sizes,
            disutilities: d.disutilities,
            budgets: d.budgets,
            denominator: d.denominator,
            special_case: None,
            subjective: false,
            divisible: false,
        }
    }
}

impl GenConfigFile {
    pub fn to_config(&self, seed: u64) -> Result<GeneratorConfig> {
        let special_case = self
            .special_case
            .as_deref()
            .map(str::parse::<SpecialCase>)
            .transpose()
            .map_err(anyhow::Error::msg)?;
        Ok(GeneratorConfig {
            seed,
            agents: self.agents,
            chores: self.chores,
            sizes: self.sizes,
            disutilities: self.disutilities,
            budgets: self.budgets,
            denominator: self.denominator,
            special_case,
            subjective: self.subjective,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfigFile {
    pub seed: u64,
    pub instances: u64,
    pub algorithms: Vec<String>,
    pub generator: GenConfigFile,
}

impl Default for BenchConfigFile {
    fn default() -> Self {
        BenchConfigFile {
            seed: 0,
            instances: 50,
            algorithms: vec!["efx".into(), "densest-first".into()],
            generator: GenConfigFile::default(),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
