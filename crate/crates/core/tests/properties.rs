mod common;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use common::props;

fn run(check: props::Property) {
    let config = Config { cases: 200, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&any::<u64>(), |seed| check(seed).map_err(TestCaseError::fail)).unwrap();
}

#[test]
fn monotone_in_the_set() {
    run(props::monotonicity);
}

#[test]
fn hull_is_idempotent() {
    run(props::idempotence);
}

#[test]
fn equivariant_under_scaling_and_shift() {
    run(props::equivariance);
}

#[test]
fn convex_along_rank_two_curves() {
    run(props::rank_two_convexity);
}

#[test]
fn curve_families_meet_continuously() {
    run(props::gamma_continuity);
}
