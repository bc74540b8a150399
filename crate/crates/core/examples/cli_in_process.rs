//! Drives the command line from code, as a test harness would.
//!
//! cargo run --example cli_in_process

use std::io;

use picaria::cli::run;

fn main() {
    let mut out = io::stdout();
    let mut err = io::stderr();
    for args in [
        vec!["picaria", "value", "..ooxxx.o:x"],
        vec!["picaria", "best", "..o.xoxox:x"],
        vec!["picaria", "count", "--enumerate"],
        vec!["picaria", "--format", "structured", "value", ".........:x"],
        vec!["picaria", "solve", "-k", "6"],
    ] {
        println!("$ {}", args.join(" "));
        let code = run(args, &mut out, &mut err);
        println!("(exit {code})\n");
    }
}
