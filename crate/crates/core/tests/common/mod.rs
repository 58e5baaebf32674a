#![allow(dead_code)]

use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

/// Every property runs once per seed.
pub const SEEDS: [u64; 3] = [1, 2, 3];

pub fn runner(seed: u64, cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    })
}

/// Runs `test` on `cases` draws from `strategy` for each seed in [`SEEDS`].
pub fn check<S, F>(cases: u32, strategy: S, test: F)
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    for seed in SEEDS {
        if let Err(e) = runner(seed, cases).run(&strategy, &test) {
            panic!("seed {seed}: {e}");
        }
    }
}
