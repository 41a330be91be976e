//! The oracle and invariant suite, plus the sign-dropping mutation it must catch.

use ysr_fidelity::verify::{run, VerifyOptions};

fn main() {
    let quick =
        VerifyOptions { oracle_clusters: 20, matrix_pairs_4: 1000, matrix_pairs_16: 100, ..VerifyOptions::default() };
    for mutation in [false, true] {
        let report = run(&VerifyOptions { mutation, ..quick });
        println!("mutation = {mutation}: passed = {}", report.passed());
        for c in &report.checks {
            println!("  {:5} {:24} {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail);
        }
    }
}
