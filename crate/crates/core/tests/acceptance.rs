//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use conecalc::io::suite::{run_criterion, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let start = Instant::now();
    let mut failed = 0;
    for k in 1..=CRITERIA.len() {
        let t = Instant::now();
        let c = match run_criterion(k, &cfg) {
            Ok(c) => c,
            Err(e) => {
                println!("criterion {k:>2} FAIL  error: {e}");
                failed += 1;
                continue;
            }
        };
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {k:>2} {verdict}  {:<26} {:>8} checks {:>4} failures  {:>6.1}s",
            c.name,
            c.checks,
            c.failure_count,
            t.elapsed().as_secs_f64()
        );
        for f in c.failures.iter().take(5) {
            println!("    {f}");
        }
        failed += usize::from(!c.passed);
    }
    println!("{} of {} criteria passed in {:.1}s", CRITERIA.len() - failed, CRITERIA.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
