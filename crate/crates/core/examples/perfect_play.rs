//! Both sides follow the table. On Picaria play cycles without a winner;
//! on the pentagon board X wins.
//!
//! cargo run --example perfect_play

use picaria::solver::{best_moves, solve};
use picaria::BoardSpec;
use rustc_hash::FxHashSet;

fn play(k: u8, s: u8) {
    let board = BoardSpec::new(k, s).unwrap();
    let table = solve(&board);
    let mut p = board.initial_position();
    let mut seen = FxHashSet::default();
    println!("({k},{s}) start {}", table.value(&board, &p).unwrap());
    for ply in 1.. {
        if let Some(w) = p.winner(&board).unwrap() {
            println!("  {w} completes a line after {} plies", ply - 1);
            return;
        }
        if !seen.insert(board.canonical(&p)) {
            println!("  position repeats after {} plies: {}", ply - 1, board.format_position(&p));
            return;
        }
        let best = best_moves(&board, &table, &p).unwrap()[0];
        println!("  {:>2}. {} {:<10} {}", ply, p.to_move(), best.mv.to_string(), best.for_mover());
        p = p.apply_move(&board, best.mv).unwrap();
    }
}

fn main() {
    play(3, 4);
    play(3, 5);
}
