//! One test per acceptance criterion; each prints a single PASS/FAIL line.
//! Criteria run one at a time so the time budgets are measured unloaded.

use std::sync::Mutex;

use gridforge_core::selftest::run_criterion;

static SERIAL: Mutex<()> = Mutex::new(());

fn check(id: u8) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let r = run_criterion(id);
    println!("{r}");
    assert!(r.passed, "{r}");
}

#[test]
fn criterion_1_level_one_grid() {
    check(1);
}

#[test]
fn criterion_2_appendix_conformance() {
    check(2);
}

#[test]
fn criterion_3_duality_sweep() {
    check(3);
}

#[test]
fn criterion_4_alignment() {
    check(4);
}

#[test]
fn criterion_5_trace_examples() {
    check(5);
}

#[test]
fn criterion_6_classification() {
    check(6);
}

#[test]
fn criterion_7_seed_synthesis() {
    check(7);
}

#[test]
fn criterion_8_generating_functions() {
    check(8);
}

#[test]
fn criterion_9_performance() {
    check(9);
}
