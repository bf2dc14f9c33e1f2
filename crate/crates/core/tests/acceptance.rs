//! The acceptance suite: one test per campaign claim, each with the wall-time
//! budget the claim is expected to hold on desk hardware.
//!
//! Tests serialize through a global gate so every claim gets the full machine;
//! the in-claim parallelism (rayon) is the intended source of concurrency.
//! Run with `-- --nocapture` to see the one-line evidence summaries.

use niho_core::campaign::{run_claim, CampaignConfig};
use std::sync::Mutex;
use std::time::Duration;

static GATE: Mutex<()> = Mutex::new(());

fn check(id: u32, budget: Option<Duration>) {
    let _gate = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let cfg = CampaignConfig::default();
    let outcome = run_claim(id, &cfg);
    println!(
        "criterion {:02} [{}] {} in {} ms: {}",
        outcome.id,
        outcome.name,
        if outcome.passed { "pass" } else { "FAIL" },
        outcome.millis,
        outcome.detail
    );
    assert!(outcome.passed, "criterion {} failed: {}", id, outcome.detail);
    if let Some(budget) = budget {
        assert!(
            outcome.millis <= budget.as_millis(),
            "criterion {} took {} ms, over its {} ms budget",
            id,
            outcome.millis,
            budget.as_millis()
        );
    }
}

#[test]
fn acceptance_01_degenerate_base_case() {
    check(1, Some(Duration::from_secs(1)));
}

#[test]
fn acceptance_02_smallest_even_field() {
    check(2, Some(Duration::from_secs(1)));
}

#[test]
fn acceptance_03_odd_field_containment() {
    check(3, Some(Duration::from_secs(30)));
}

#[test]
fn acceptance_04_larger_even_fields() {
    check(4, Some(Duration::from_secs(600)));
}

#[test]
fn acceptance_05_expansion_table_reproduction() {
    check(5, Some(Duration::from_secs(300)));
}

#[test]
fn acceptance_06_odd_characteristic_value() {
    check(6, Some(Duration::from_secs(1)));
}

#[test]
fn acceptance_07_unit_circle_census() {
    check(7, Some(Duration::from_secs(1)));
}

#[test]
fn acceptance_08_separable_exclusion() {
    check(8, Some(Duration::from_secs(60)));
}

#[test]
fn acceptance_09_orbit_and_trace_formulas() {
    check(9, Some(Duration::from_secs(120)));
}

#[test]
fn acceptance_10_root_pair_sum_vanishing() {
    check(10, Some(Duration::from_secs(120)));
}

#[test]
fn acceptance_11_sequence_spectrum_equivalence() {
    check(11, Some(Duration::from_secs(30)));
}

#[test]
fn acceptance_12_modulus_invariance() {
    // No stated wall-time budget for this one; correctness only.
    check(12, None);
}
