//! Bench-level acceptance suite: every numeric criterion at its stated
//! tolerance on the desk-scale grids, one pass/fail line per criterion.
//! Run with `cargo test -p wigsim --test acceptance -- --nocapture` to
//! watch the lines as they print. The companion CLI determinism
//! criterion lives in the `wigsim-cli` integration tests.

use wigsim::validation::{run_all, Scale};

#[test]
fn acceptance_criteria() {
    let outcomes = run_all(Scale::Desk);
    let mut failed = Vec::new();
    for outcome in &outcomes {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:<26} {}", outcome.name, outcome.detail);
        if !outcome.passed {
            failed.push(outcome.name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
