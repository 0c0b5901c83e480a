//! Shared inputs for the criterion benchmarks.

use optomech_core::{steady_state, SteadyState, SystemConfig};

/// Baseline parameters with the given mismatch, plus their steady state.
pub fn fixture(mismatch: f64) -> (SystemConfig, SteadyState) {
    let config = SystemConfig::baseline().with_mismatch(mismatch);
    let ss = steady_state(&config).expect("baseline is valid");
    (config, ss)
}
