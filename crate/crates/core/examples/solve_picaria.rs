//! Solves Picaria and prints what the table knows about the opening.
//!
//! cargo run --example solve_picaria

use picaria::solver::{best_moves, solve};
use picaria::BoardSpec;

fn main() {
    let board = BoardSpec::new(3, 4).expect("Picaria is a valid board");
    let table = solve(&board);
    let counts = table.counts();
    println!("{board}: {} positions up to symmetry", table.len());
    println!("  {} wins, {} losses, {} draws for the side to move", counts.win, counts.loss, counts.draw);

    let start = board.initial_position();
    println!("empty board: {}", table.value(&board, &start).unwrap());
    for r in best_moves(&board, &table, &start).unwrap() {
        println!("  X {:<8} -> {}", r.mv.to_string(), r.for_mover());
    }

    let race = board.parse_position("..o.xoxox:x").unwrap();
    let best = best_moves(&board, &table, &race).unwrap()[0];
    println!("race ..o.xoxox:x is {}; X plays {}", table.value(&board, &race).unwrap(), best.mv);
}
