//! Shared inputs for the benchmarks in `benches/`.

use heatwit_core::thermo::geometric_grid;
use heatwit_core::ModelSpec;

/// Rings benchmarked for exact diagonalization.
pub fn ising_rings() -> Vec<ModelSpec> {
    [8, 10, 12].iter().map(|&n| ModelSpec::ising(n, 1.0, 1.0)).collect()
}

/// Temperatures used for curve evaluation.
pub fn temperature_grid() -> Vec<f64> {
    geometric_grid(0.1, 5.0, 50).expect("static grid is valid")
}
