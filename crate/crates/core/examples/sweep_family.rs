//! Solves the k = 3 family for s = 3..=8 and prints each root value.
//!
//! cargo run --release --example sweep_family

use picaria::cli::sweep;

fn main() {
    for row in sweep(3..=3, 3..=8, 1_000_000, None) {
        match (&row.root, &row.skipped) {
            (Some(root), _) => println!(
                "(k={}, s={}) {:>7} states  {root}{}",
                row.k,
                row.s,
                row.states.unwrap_or(0),
                row.depth.map(|d| format!(" in {d} plies")).unwrap_or_default()
            ),
            (None, Some(why)) => println!("(k={}, s={}) skipped: {why}", row.k, row.s),
            (None, None) => unreachable!(),
        }
    }
}
