//! Acceptance suite: the eleven numbered criteria from `sqfree::checks`, one
//! test per criterion so `cargo test --test acceptance` prints a pass/fail
//! line for each. The heavy ones (empirical density at X = 8, brute-force
//! orbit counts at p = 5, the X = 2000 lattice comparison) run at full scope
//! here; use `sqfree verify --quick` for the fast subset.

use sqfree::checks::{self, CheckConfig, CriterionReport};

fn assert_criterion(report: CriterionReport) {
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_01_density_enclosure() {
    assert_criterion(checks::density_enclosure(&CheckConfig::default()));
}

#[test]
fn criterion_02_local_density_formula() {
    assert_criterion(checks::local_density_formula(&CheckConfig::default()));
}

#[test]
fn criterion_03_moebius_identity() {
    assert_criterion(checks::moebius_identity(&CheckConfig::default()));
}

#[test]
fn criterion_04_empirical_density() {
    assert_criterion(checks::empirical_density(&CheckConfig::default()));
}

#[test]
fn criterion_05_weak_pair_embedding() {
    assert_criterion(checks::weak_pair_embedding(&CheckConfig::default()));
}

#[test]
fn criterion_06_orbit_count_agreement() {
    assert_criterion(checks::orbit_count_agreement(&CheckConfig::default()));
}

#[test]
fn criterion_07_exponential_sum_bounds() {
    assert_criterion(checks::exponential_sum_bounds(&CheckConfig::default()));
}

#[test]
fn criterion_08_lattice_vs_main_term() {
    assert_criterion(checks::lattice_vs_main_term(&CheckConfig::default()));
}

#[test]
fn criterion_09_lattice_exact_oracle() {
    assert_criterion(checks::lattice_exact_oracle(&CheckConfig::default()));
}

#[test]
fn criterion_10_sieve_weight_band() {
    assert_criterion(checks::sieve_weight_band(&CheckConfig::default()));
}

#[test]
fn criterion_11_reduction_identity() {
    assert_criterion(checks::reduction_identity(&CheckConfig::default()));
}
