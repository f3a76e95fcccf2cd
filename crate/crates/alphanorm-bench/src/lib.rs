//! Shared instance builders for the benchmark targets.

use alphanorm::{standardize, LinearSimConfig, StandardizedDesign};

/// A standardized benchmark design drawn from the correlated linear model.
pub fn benchmark_design(n: usize, p: usize, seed: u64) -> StandardizedDesign {
    let data = alphanorm::simulate_linear(&LinearSimConfig {
        n_train: n,
        n_test: 1,
        p,
        rho: 0.1,
        n_true: 5.min(p),
        seed,
        ..LinearSimConfig::default()
    })
    .expect("simulate benchmark data");
    standardize(&data.x_train, &data.y_train).expect("standardize benchmark data")
}
