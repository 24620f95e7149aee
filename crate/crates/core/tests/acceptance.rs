//! Runs the twelve acceptance criteria and prints one line per criterion.
//!
//! `cargo test -p qclock --test acceptance -- 3 9` runs a subset.
//! `QCLOCK_SEED` overrides the master seed.

use std::process::ExitCode;

use qclock::suite::{run, CRITERIA};

const DEFAULT_SEED: u64 = 20_100_601;

fn main() -> ExitCode {
    let seed = std::env::var("QCLOCK_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    let picked: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids: Vec<u8> = CRITERIA.iter().map(|c| c.0).filter(|id| picked.is_empty() || picked.contains(id)).collect();
    println!("acceptance suite, seed {seed}");
    let mut failed = 0;
    for id in ids {
        let rep = run(id, seed);
        println!("{}", rep.line());
        if !rep.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
