//! Benchmark fixtures shared by the criterion targets.

use covertop_core::{generate_random, Domain, NetworkConfig};

/// Random network at the planner's default density: `n` sensors in a
/// 500 x 500 square with `r_c = 50`, `eps = 10`.
pub fn default_density(n: usize, k: usize, seed: u64) -> NetworkConfig {
    let side = 500.0 * (n as f64 / 30.0).sqrt();
    generate_random(n, k, 50.0, 10.0, Domain::square(side), seed).expect("valid parameters")
}
