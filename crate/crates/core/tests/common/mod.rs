#![allow(dead_code)]

use proptest::test_runner::{Config, RngSeed};
use qcorr_core::grid::{Boundary, Grid};

/// Fixed-seed proptest configuration so every run draws the same cases.
pub fn seeded(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn dirichlet(n: usize, half_width: f64) -> Grid {
    Grid::uniform(-half_width, half_width, n, Boundary::Dirichlet).unwrap()
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
