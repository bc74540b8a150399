//! Replays the built-in proof fixtures against the Picaria solution.
//!
//! cargo run --example verify_proofs

use picaria::solver::solve;
use picaria::verify::{builtin_fixtures, replay};
use picaria::BoardSpec;

fn main() {
    let board = BoardSpec::new(3, 4).unwrap();
    let table = solve(&board);
    let mut failed = 0;
    for fixture in builtin_fixtures() {
        let report = replay(&board, &table, &fixture).expect("fixtures are legal");
        let mark = if report.passed() { "ok  " } else { "FAIL" };
        failed += usize::from(!report.passed());
        println!("{mark} {:<24} {}", report.name, report.anchor);
        for c in &report.claims {
            println!("       {:<22} at {}  {}", c.claim, c.position, c.detail);
        }
    }
    println!("{failed} failures");
}
