//! Acceptance suite: runs every criterion at its fixed resolution and
//! prints one PASS/FAIL line per criterion. Exits non-zero on any failure.

use std::process::ExitCode;
use std::time::Instant;

use stokeslp_core::verify::{criterion, CRITERIA};

const SEED: u64 = 20240601;

fn main() -> ExitCode {
    let verbose = std::env::var_os("ACCEPTANCE_VERBOSE").is_some();
    let start = Instant::now();
    let mut failed = 0;
    for (k, name) in CRITERIA {
        let t = Instant::now();
        let (ok, detail) = match criterion(k, SEED) {
            Ok(rows) => {
                let bad: Vec<_> = rows.iter().filter(|r| !r.pass()).collect();
                if verbose {
                    for r in &rows {
                        println!("    {}", r.csv());
                    }
                }
                let detail = match bad.first() {
                    None => format!("{} checks", rows.len()),
                    Some(r) => format!("{} of {} checks failed, first: {}", bad.len(), rows.len(), r.csv()),
                };
                (bad.is_empty(), detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {k:>2} ({name}): {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed in {:.1}s", CRITERIA.len() - failed, CRITERIA.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
