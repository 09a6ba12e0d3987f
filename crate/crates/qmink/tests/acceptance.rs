//! Acceptance criteria at their stated parameters and tolerances.
//!
//! Each test prints one line `criterion N (name): PASS|FAIL` followed by the
//! individual checks, then asserts the criterion passed.

use qmink::suite::{criterion, Params, CRITERIA};
use std::time::Instant;

fn run(number: u8) {
    let name = CRITERIA
        .iter()
        .find(|(n, _)| *n == number)
        .map(|(_, name)| *name)
        .expect("known criterion");
    let clock = Instant::now();
    let report = criterion(number, &Params::default()).expect("criterion runs");
    let verdict = if report.pass() { "PASS" } else { "FAIL" };
    println!(
        "criterion {number} ({name}): {verdict} [{:.1} s]",
        clock.elapsed().as_secs_f64()
    );
    for c in &report.checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        let rel = match c.relation {
            qmink::suite::Relation::Le => "<=",
            qmink::suite::Relation::Ge => ">=",
        };
        println!("    {mark} {}: {:e} {rel} {:e}", c.name, c.value, c.bound);
    }
    for n in &report.notes {
        println!("    note {}: {}", n.name, n.value);
    }
    assert!(report.pass(), "criterion {number} ({name}) failed");
}

#[test]
fn criterion_01_kernel_convergence() {
    run(1);
}

#[test]
fn criterion_02_eigenvector_property() {
    run(2);
}

#[test]
fn criterion_03_commutator_diagonal() {
    run(3);
}

#[test]
fn criterion_04_trace_defect() {
    run(4);
}

#[test]
fn criterion_05_vacuum_cyclicity() {
    run(5);
}

#[test]
fn criterion_06_measure_normalization() {
    run(6);
}

#[test]
fn criterion_07_representation() {
    run(7);
}

#[test]
fn criterion_08_classical_cross_oracles() {
    run(8);
}

#[test]
fn criterion_09_orbit_classification() {
    run(9);
}

#[test]
fn criterion_10_semiclassical_asymptotics() {
    run(10);
}

#[test]
fn criterion_11_toeplitz_consistency() {
    run(11);
}
