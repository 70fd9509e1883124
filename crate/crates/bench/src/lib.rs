//! Instance families shared by the benchmarks.

use chorefair::harness::{generate, GeneratorConfig};
use chorefair::Instance;

/// Integer instance with exactly `agents` agents and `chores` chores.
pub fn fixed_shape(agents: usize, chores: usize, seed: u64) -> Instance {
    let config = GeneratorConfig {
        agents: (agents, agents),
        chores: (chores, chores),
        ..GeneratorConfig::default().with_seed(seed)
    };
    generate(&config).expect("valid config")
}
