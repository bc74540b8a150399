//! Counts sliding-phase positions up to symmetry with Burnside's lemma and
//! checks the result by brute force.
//!
//! cargo run --example count_orbits

use picaria::board::BoardSpec;
use picaria::counting::{burnside_orbits, count_double_win_orbits, enumerate_orbits, Profile};

fn main() {
    for s in [3, 4, 5] {
        let board = BoardSpec::new(3, s).unwrap();
        let profile = Profile::full(&board);
        let mut report = burnside_orbits(&board, profile).unwrap();
        report.enumerated_orbits = enumerate_orbits(&board, profile).ok();
        println!("{report}\n");
    }

    let picaria = BoardSpec::new(3, 4).unwrap();
    let (n, reps) = count_double_win_orbits(&picaria);
    println!("{n} boards where both players hold a line:");
    for p in reps {
        println!("  {}", &picaria.format_position(&p)[..9]);
    }
}
