//! One line per acceptance criterion. Each criterion runs its verification
//! suite and must pass within the pinned time limit.

use std::process::ExitCode;
use std::time::Duration;

use fieldred::harness::{run_suite, Budget, Config, Status, SUITES};

/// Wall-time limits in seconds, criterion order.
const LIMITS: [u64; 13] = [30, 5, 10, 300, 300, 30, 60, 300, 300, 600, 120, 300, 180];

fn main() -> ExitCode {
    let cfg = Config {
        budget: Budget::Small,
        seed: 0,
    };
    let mut failed = 0;
    for (i, suite) in SUITES.iter().enumerate() {
        let limit = Duration::from_secs(LIMITS[i]);
        let line = match run_suite(suite, &cfg) {
            Ok(rep) => {
                let status = rep.status();
                let in_time = rep.elapsed <= limit;
                let pass = status != Status::Fail && in_time;
                if !pass {
                    failed += 1;
                    eprint!("{}", rep.to_text(true));
                }
                format!(
                    "{} criterion {:>2} {:<22} checks={:<3} skipped={} time={:.2}s limit={}s",
                    if pass { "PASS" } else { "FAIL" },
                    i + 1,
                    suite,
                    rep.checks.len(),
                    rep.count(Status::SkippedBudget),
                    rep.elapsed.as_secs_f64(),
                    limit.as_secs()
                )
            }
            Err(e) => {
                failed += 1;
                format!("FAIL criterion {:>2} {suite}: {e}", i + 1)
            }
        };
        println!("{line}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
