//! The nine acceptance criteria, one suite each, printed as pass/fail lines.

use std::io::Write;

use scott_core::verify::{run_suite, Status, Suite, VerifyOptions};

#[test]
fn acceptance() {
    let opts = VerifyOptions::default();
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    let mut failed = Vec::new();
    for (i, suite) in Suite::ALL.into_iter().enumerate() {
        let report = run_suite(suite, &opts);
        writeln!(out, "criterion {}: {}", i + 1, report.summary_line()).unwrap();
        for note in &report.notes {
            writeln!(out, "    {note}").unwrap();
        }
        if report.status != Status::Pass {
            for f in &report.failures {
                writeln!(out, "    failure: {f}").unwrap();
            }
            failed.push(suite.name());
        }
    }
    drop(out);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
