//! Runs the twelve acceptance criteria and prints one line per criterion.
//! `ACCEPTANCE_ONLY=3,7` restricts the run to the listed criteria.

use warpflow_cli::bench::{run_criterion, CRITERIA};

fn main() {
    let only: Option<Vec<u8>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|v| v.trim().parse().ok()).collect());
    let mut failed = 0;
    for &(id, _) in CRITERIA.iter() {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let result = run_criterion(id);
        println!("{result}");
        failed += usize::from(!result.passed);
    }
    println!("acceptance: {} failed", failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
