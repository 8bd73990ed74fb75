//! One test per reproduction criterion. Each prints a PASS/FAIL line;
//! run with `--nocapture` to see them.

use irrat_core::verify::{run_criterion, CRITERIA};

fn workers() -> usize {
    std::thread::available_parallelism().map_or(2, |n| n.get()).max(2)
}

fn criterion(id: u8) {
    let check = run_criterion(id, workers()).expect("known criterion");
    println!("{}", check.summary_line(true));
    assert!(check.pass, "{}", check.summary_line(true));
}

#[test]
fn ac01_interval_reproduction() {
    criterion(1);
}

#[test]
fn ac02_sandwich() {
    criterion(2);
}

#[test]
fn ac03_kempner_oracle() {
    criterion(3);
}

#[test]
fn ac04_theorem1_sweep() {
    criterion(4);
}

#[test]
fn ac05_sharpness_and_prime_factor_bound() {
    criterion(5);
}

#[test]
fn ac06_convergent_quality() {
    criterion(6);
}

#[test]
fn ac07_q19() {
    criterion(7);
}

#[test]
fn ac08_partial_sums_vs_convergents() {
    criterion(8);
}

#[test]
fn ac09_cantor_families() {
    criterion(9);
}

#[test]
fn ac10_density() {
    criterion(10);
}

#[test]
fn ac11_successor_boundary() {
    criterion(11);
}

#[test]
fn every_criterion_has_a_test() {
    assert_eq!(CRITERIA, 11);
}
