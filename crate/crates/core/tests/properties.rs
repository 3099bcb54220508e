mod common;

use common::*;

const CASES: u32 = 1000;

fn check(r: PropResult) {
    if let Err(e) = r {
        panic!("{e}");
    }
}

#[test]
fn projection_is_idempotent() {
    check(projection_idempotent(CASES));
}

#[test]
fn projection_is_nonexpansive() {
    check(projection_nonexpansive(CASES));
}

#[test]
fn projection_satisfies_variational_inequality() {
    check(projection_variational_inequality(CASES));
}

#[test]
fn zero_lies_in_every_normal_cone() {
    check(zero_in_normal_cone(CASES));
}

#[test]
fn ball_midpoints_are_interior() {
    check(ball_strictly_convex(CASES));
}

#[test]
fn subgradient_agrees_with_central_differences() {
    check(subgradient_matches_finite_differences(CASES));
}

#[test]
fn subgradient_inequality_holds() {
    check(subgradient_inequality(CASES));
}

#[test]
fn perimeter_is_translation_and_scale_covariant() {
    check(perimeter_invariances(CASES));
}

#[test]
fn aitken_is_exact_on_geometric_sequences() {
    check(aitken_exact_on_geometric_sequences(CASES));
}

#[test]
fn exact_line_search_trace_is_monotone() {
    line_search_trace_monotone().unwrap();
}

#[test]
fn traces_are_bit_identical_across_runs() {
    deterministic_traces().unwrap();
}
