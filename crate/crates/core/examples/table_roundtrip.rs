//! Writes a solve table to disk, reads it back and shows that a damaged
//! file is refused.
//!
//! cargo run --example table_roundtrip

use picaria::solver::{export_table, import_table, solve};
use picaria::BoardSpec;

fn main() {
    let board = BoardSpec::new(3, 4).unwrap();
    let table = solve(&board);
    let path = std::env::temp_dir().join(format!("picaria-example-{}.table", std::process::id()));

    export_table(&table, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    println!("{}", text.lines().take(8).collect::<Vec<_>>().join("\n"));
    let back = import_table(&path, &board).unwrap();
    println!("re-imported {} entries, equal: {}", back.len(), back == table);

    std::fs::write(&path, text.replacen(" D 0", " W 1", 1)).unwrap();
    match import_table(&path, &board) {
        Ok(_) => println!("damaged file accepted?!"),
        Err(e) => println!("damaged file refused: {e}"),
    }
    std::fs::remove_file(&path).ok();
}
