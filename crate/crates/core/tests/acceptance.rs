//! The ten acceptance criteria, one status line each. Runs without the
//! libtest harness so the lines always reach the output.

mod common;

use std::process::ExitCode;

use tronquee::acceptance::{run_all, Criterion};

fn main() -> ExitCode {
    let oracle = |eq: &tronquee::EquationSpec, b: &tronquee::Branch, a: &[tronquee::ExactScalar], w: &[tronquee::ExactScalar]| {
        common::oracle_residual_order(eq, b, a, w)
    };
    let results: Vec<Criterion> = run_all(20240611, Some(&oracle));
    for c in &results {
        println!("{}", c.line());
    }
    let failed: Vec<u32> = results.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
