//! Prints the nodes, edges, lines and symmetries of a (k, s) board.
//!
//! cargo run --example board_geometry -- 5

use picaria::board::BoardSpec;

fn main() {
    let s: u8 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    let board = BoardSpec::new(3, s).unwrap_or_else(|e| panic!("{e}"));
    println!("{board}");
    for (i, node) in board.nodes().iter().enumerate() {
        println!("  node {i:>2} {:?}, degree {}", node.role, board.degree(i as u8));
    }
    println!("{} edges: {:?}", board.edges().len(), board.edges());
    println!("{} lines: {:?}", board.lines().len(), board.lines());
    for g in board.symmetries() {
        println!("  {:<6} {:?} cycles {:?}", g.name, g.perm, g.cycle_lengths());
    }
    if let Ok(grid) = board.grid_mapping() {
        println!("grid cells (row, col) by node: {grid:?}");
    }
}
