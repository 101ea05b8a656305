//! The thirteen acceptance criteria, run in canonical order with one
//! printed line per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines as they
//! complete; the test fails at the end if any criterion failed, listing
//! the offenders.

use skewsim::verify::{acceptance_checks, all_passed};

#[test]
fn acceptance_criteria() {
    let reports = acceptance_checks();
    let mut failed = Vec::new();
    for (i, report) in reports.iter().enumerate() {
        println!("criterion {:>2}: {}", i + 1, report.line());
        if !report.passed {
            failed.push(format!("{} ({})", i + 1, report.name));
        }
    }
    assert!(
        all_passed(&reports),
        "failed acceptance criteria: {}",
        failed.join(", ")
    );
}
