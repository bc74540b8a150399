//! The `picaria` command line.
//!
//! ```text
//! picaria [-k K] [-s S] [--cache DIR] [--format text|structured] <command>
//!
//!   solve                    solve the board and summarize the table
//!   value <POSITION>         value of one position
//!   best <POSITION>          legal moves, best first
//!   count [--enumerate]      Burnside count of sliding-phase positions
//!   verify [--fixtures FILE] replay proof fixtures against the solution
//!   sweep [--k-range A..B] [--s-range A..B] [--guard N]
//!   serve [--port N]         run the HTTP game service
//! ```
//!
//! Exit status is 0 on success, 1 when a verification fails and 2 for usage
//! errors (bad flags, bad board parameters, unparsable positions).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::api::{self, GameService, ServiceConfig};
use crate::board::BoardSpec;
use crate::counting::{burnside_orbits, enumerate_orbits, multinomial, Profile};
use crate::position::{Phase, Position};
use crate::solver::{best_moves, solve_cached, GameValue, SolveError, SolveTable, TableSource};
use crate::verify::{builtin_fixtures, parse_fixtures, replay, ProofFixture};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default sweep limit on raw sliding-phase boards per instance.
pub const DEFAULT_GUARD: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(name = "picaria", version, about = "Solve, count and play Picaria and its (k, s) relatives")]
pub struct Cli {
    /// Stones per player.
    #[arg(short = 'k', long = "stones", global = true, default_value_t = 3)]
    pub k: u8,
    /// Sides of the board polygon.
    #[arg(short = 's', long = "sides", global = true, default_value_t = 4)]
    pub s: u8,
    /// Directory for cached solve tables.
    #[arg(long, global = true, env = "PICARIA_CACHE_DIR")]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the board and print state and value counts.
    Solve,
    /// Print the value of a position given in wire notation.
    Value { position: String },
    /// List the legal moves of a position, best first.
    Best { position: String },
    /// Count sliding-phase positions up to symmetry.
    Count {
        /// Also count by brute-force enumeration.
        #[arg(long)]
        enumerate: bool,
    },
    /// Replay proof fixtures and check their claims.
    Verify {
        /// Fixture file to use instead of the built-in catalog.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Solve a range of boards and tabulate their root values.
    Sweep {
        #[arg(long, default_value = "3", value_parser = parse_range)]
        k_range: RangeInclusive<u8>,
        #[arg(long, default_value = "3..7", value_parser = parse_range)]
        s_range: RangeInclusive<u8>,
        /// Skip instances with more raw sliding-phase boards than this.
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u128,
    },
    /// Run the HTTP game service until interrupted.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Append-only session log.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

/// Accepts `N`, `A..B` or `A..=B`; both forms of range are inclusive.
pub fn parse_range(text: &str) -> Result<RangeInclusive<u8>, String> {
    let num = |t: &str| t.trim().parse::<u8>().map_err(|_| format!("bad number {t:?}"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = num(text)?;
            (n, n)
        }
    };
    if a > b {
        return Err(format!("empty range {text:?}"));
    }
    Ok(a..=b)
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    if let Command::Sweep { k_range, s_range, guard } = &cli.command {
        return cmd_sweep(cli, k_range.clone(), s_range.clone(), *guard, out);
    }
    let spec = BoardSpec::new(cli.k, cli.s).map_err(usage)?;
    match &cli.command {
        Command::Solve => cmd_solve(cli, &spec, out),
        Command::Value { position } => cmd_value(cli, &spec, position, out),
        Command::Best { position } => cmd_best(cli, &spec, position, out),
        Command::Count { enumerate } => cmd_count(cli, &spec, *enumerate, out),
        Command::Verify { fixtures } => cmd_verify(cli, &spec, fixtures.as_deref(), out),
        Command::Serve { port, host, log } => cmd_serve(cli, spec, host, *port, log.clone(), out),
        Command::Sweep { .. } => unreachable!(),
    }
}

fn load_table(cli: &Cli, spec: &BoardSpec) -> Result<(SolveTable, TableSource), CliError> {
    solve_cached(spec, cli.cache.as_deref()).map_err(|e| CliError::Failure(e.to_string()))
}

fn emit(cli: &Cli, out: &mut dyn Write, text: &str, doc: impl Serialize) -> Result<(), CliError> {
    match cli.format {
        Format::Text => write!(out, "{text}")?,
        Format::Structured => {
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn value_json(v: GameValue) -> serde_json::Value {
    json!({ "value": v.to_string(), "class": v.class(), "depth": v.depth() })
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
struct PhaseCounts {
    placement: usize,
    sliding: usize,
    total: usize,
}

fn phase_counts(spec: &BoardSpec, table: &SolveTable) -> PhaseCounts {
    let mut c = PhaseCounts::default();
    for (p, _) in table.iter() {
        match p.phase(spec) {
            Phase::Placement => c.placement += 1,
            Phase::Sliding => c.sliding += 1,
        }
    }
    c.total = c.placement + c.sliding;
    c
}

fn cmd_solve(cli: &Cli, spec: &BoardSpec, out: &mut dyn Write) -> Result<i32, CliError> {
    let started = Instant::now();
    let (table, source) = load_table(cli, spec)?;
    let seconds = started.elapsed().as_secs_f64();
    let root = table.value(spec, &spec.initial_position()).map_err(|e| CliError::Failure(e.to_string()))?;
    let states = phase_counts(spec, &table);
    let counts = table.counts();
    let (win_depth, loss_depth) = table.max_depths();

    let mut text = String::new();
    writeln!(text, "board      {spec}").unwrap();
    writeln!(
        text,
        "states     {} ({} placement, {} sliding)",
        states.total, states.placement, states.sliding
    )
    .unwrap();
    writeln!(text, "values     {} win, {} loss, {} draw", counts.win, counts.loss, counts.draw).unwrap();
    writeln!(text, "longest    win {win_depth} plies, loss {loss_depth} plies").unwrap();
    writeln!(text, "root       {root}").unwrap();
    let verb = match source {
        TableSource::Solved => "solved",
        TableSource::Cache => "loaded from cache",
    };
    writeln!(text, "time       {seconds:.3}s ({verb})").unwrap();

    let doc = json!({
        "k": spec.k(), "s": spec.s(),
        "states": states, "counts": counts,
        "max_depth": { "win": win_depth, "loss": loss_depth },
        "root": value_json(root),
        "source": source, "seconds": seconds,
    });
    emit(cli, out, &text, doc)?;
    Ok(EXIT_OK)
}

fn parse_query(spec: &BoardSpec, table: &SolveTable, text: &str) -> Result<(Position, GameValue), CliError> {
    let p = spec.parse_position(text).map_err(usage)?;
    match table.value(spec, &p) {
        Ok(v) => Ok((p, v)),
        Err(SolveError::Unknown(pos)) => Err(usage(format!(
            "position {pos} cannot arise in play from the empty board"
        ))),
        Err(e) => Err(usage(e)),
    }
}

fn cmd_value(cli: &Cli, spec: &BoardSpec, text: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let (table, _) = load_table(cli, spec)?;
    let (p, v) = parse_query(spec, &table, text)?;
    let mut doc = value_json(v);
    doc["position"] = json!(spec.format_position(&p));
    doc["to_move"] = json!(p.to_move());
    emit(cli, out, &format!("{v}\n"), doc)?;
    Ok(EXIT_OK)
}

fn cmd_best(cli: &Cli, spec: &BoardSpec, text: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let (table, _) = load_table(cli, spec)?;
    let (p, v) = parse_query(spec, &table, text)?;
    let ranked = best_moves(spec, &table, &p).map_err(usage)?;
    let mut s = String::new();
    writeln!(s, "{} to move: {v}", p.to_move()).unwrap();
    let mut moves = Vec::with_capacity(ranked.len());
    for r in &ranked {
        let after = spec.format_position(&p.apply_unchecked(r.mv));
        writeln!(s, "  {:<12} {:<9} -> {after} {}", r.mv.to_string(), r.for_mover().to_string(), r.after)
            .unwrap();
        moves.push(json!({
            "move": r.mv.to_string(),
            "for_mover": value_json(r.for_mover()),
            "after": after,
            "after_value": value_json(r.after),
        }));
    }
    if ranked.is_empty() {
        writeln!(s, "  no legal moves").unwrap();
    }
    let doc = json!({
        "position": spec.format_position(&p),
        "to_move": p.to_move(),
        "value": value_json(v),
        "moves": moves,
    });
    emit(cli, out, &s, doc)?;
    Ok(EXIT_OK)
}

fn cmd_count(cli: &Cli, spec: &BoardSpec, enumerate: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let profile = Profile::full(spec);
    let mut report = burnside_orbits(spec, profile).map_err(usage)?;
    if enumerate {
        report.enumerated_orbits = Some(enumerate_orbits(spec, profile).map_err(usage)?);
    }
    emit(cli, out, &format!("{report}\n"), &report)?;
    match report.enumerated_orbits {
        Some(e) if e != report.orbit_count_raw => Err(CliError::Failure(format!(
            "enumeration found {e} orbits, Burnside gives {}",
            report.orbit_count_raw
        ))),
        _ => Ok(EXIT_OK),
    }
}

fn cmd_verify(
    cli: &Cli,
    spec: &BoardSpec,
    file: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let fixtures: Vec<ProofFixture> = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            parse_fixtures(&text).map_err(usage)?
        }
        None => builtin_fixtures(),
    };
    let (table, _) = load_table(cli, spec)?;

    let width = fixtures.iter().map(|f| f.name.len()).max().unwrap_or(0);
    let mut text = String::new();
    let mut docs = Vec::new();
    let mut failed = 0;
    for f in &fixtures {
        match replay(spec, &table, f) {
            Ok(report) => {
                let ok = report.passed();
                failed += usize::from(!ok);
                let tag = if ok { "PASS" } else { "FAIL" };
                writeln!(text, "{tag}  {:<width$}  {}", f.name, f.anchor).unwrap();
                for c in report.failures() {
                    writeln!(text, "      claim {} at {}: {}", c.claim, c.position, c.detail).unwrap();
                    if let Some(m) = &c.counterexample {
                        writeln!(text, "      refuted by {m}").unwrap();
                    }
                }
                docs.push(json!({ "passed": ok, "report": report }));
            }
            Err(e) => {
                failed += 1;
                writeln!(text, "ERROR {:<width$}  {}\n      {e}", f.name, f.anchor).unwrap();
                docs.push(json!({ "passed": false, "name": f.name, "anchor": f.anchor, "error": e.to_string() }));
            }
        }
    }
    writeln!(text, "{} fixtures, {} passed, {failed} failed", fixtures.len(), fixtures.len() - failed).unwrap();
    let doc = json!({ "fixtures": docs, "total": fixtures.len(), "failed": failed });
    emit(cli, out, &text, doc)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

/// One row of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub k: u8,
    pub s: u8,
    /// Raw sliding-phase boards, the size the guard is checked against.
    pub boards: u128,
    pub states: Option<usize>,
    pub root: Option<String>,
    pub depth: Option<u32>,
    pub seconds: Option<f64>,
    pub skipped: Option<String>,
}

/// Solves every valid board in the ranges whose size is within `guard`.
pub fn sweep(
    k_range: RangeInclusive<u8>,
    s_range: RangeInclusive<u8>,
    guard: u128,
    cache: Option<&Path>,
) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for k in k_range {
        for s in s_range.clone() {
            let mut row = SweepRow {
                k,
                s,
                boards: 0,
                states: None,
                root: None,
                depth: None,
                seconds: None,
                skipped: None,
            };
            let spec = match BoardSpec::new(k, s) {
                Ok(spec) => spec,
                Err(e) => {
                    row.skipped = Some(e.to_string());
                    rows.push(row);
                    continue;
                }
            };
            row.boards = multinomial(spec.node_count() as u32, k as u32, k as u32);
            if row.boards > guard {
                row.skipped = Some(format!("{} boards exceed the guard of {guard}", row.boards));
                rows.push(row);
                continue;
            }
            let started = Instant::now();
            match solve_cached(&spec, cache) {
                Ok((table, _)) => {
                    let root = table.value(&spec, &spec.initial_position()).expect("root is in the table");
                    row.seconds = Some(started.elapsed().as_secs_f64());
                    row.states = Some(table.len());
                    row.root = Some(root.class().to_string());
                    row.depth = root.depth();
                }
                Err(e) => row.skipped = Some(e.to_string()),
            }
            rows.push(row);
        }
    }
    rows
}

fn cmd_sweep(
    cli: &Cli,
    k_range: RangeInclusive<u8>,
    s_range: RangeInclusive<u8>,
    guard: u128,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let rows = sweep(k_range, s_range, guard, cli.cache.as_deref());
    let mut text = String::new();
    writeln!(text, "{:>3} {:>3} {:>10} {:>10} {:>6} {:>6} {:>9}", "k", "s", "boards", "states", "root", "depth", "seconds")
        .unwrap();
    for r in &rows {
        match &r.skipped {
            Some(why) => writeln!(text, "{:>3} {:>3}  skipped: {why}", r.k, r.s).unwrap(),
            None => writeln!(
                text,
                "{:>3} {:>3} {:>10} {:>10} {:>6} {:>6} {:>9.3}",
                r.k,
                r.s,
                r.boards,
                r.states.unwrap_or(0),
                r.root.as_deref().unwrap_or("-"),
                r.depth.map_or("-".to_string(), |d| d.to_string()),
                r.seconds.unwrap_or(0.0)
            )
            .unwrap(),
        }
    }
    emit(cli, out, &text, &rows)?;
    Ok(EXIT_OK)
}

fn cmd_serve(
    cli: &Cli,
    spec: BoardSpec,
    host: &str,
    port: u16,
    log: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let config = ServiceConfig { cache_dir: cli.cache.clone(), log_path: log, ..Default::default() };
    let service = GameService::new(config)?;
    let (table, _) = load_table(cli, &spec)?;
    service.preload(spec, table);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port)).await?;
        writeln!(out, "listening on http://{}", listener.local_addr()?)?;
        out.flush()?;
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        api::serve(listener, Arc::new(service), shutdown).await
    })?;
    runtime.shutdown_timeout(Duration::from_secs(1));
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("picaria").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..7").unwrap(), 3..=7);
        assert_eq!(parse_range("3..=7").unwrap(), 3..=7);
        assert_eq!(parse_range("4").unwrap(), 4..=4);
        assert!(parse_range("7..3").is_err());
        assert!(parse_range("a..3").is_err());
    }

    #[test]
    fn solve_defaults_to_picaria() {
        let (code, out, _) = run_str(&["solve"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("root       DRAW"), "{out}");
    }

    #[test]
    fn bad_parameters_are_usage_errors() {
        let (code, _, err) = run_str(&["solve", "-s", "4", "-k", "6"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("error"));
        let (code, _, _) = run_str(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, err) = run_str(&["value", "xxxxxxxxx:x"]);
        assert_eq!(code, EXIT_USAGE, "{err}");
    }

    #[test]
    fn value_and_best() {
        let (code, out, _) = run_str(&["value", "..ooxxx.o:x"]);
        assert_eq!((code, out.as_str()), (EXIT_OK, "DRAW\n"));
        let (_, out, _) = run_str(&["value", ".........:x"]);
        assert_eq!(out, "DRAW\n");
        let (code, out, _) = run_str(&["--format", "structured", "best", "..o.xoxox:x"]);
        assert_eq!(code, EXIT_OK);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["moves"][0]["after_value"]["class"], "LOSS");
        assert_eq!(doc["value"]["class"], "WIN");
    }

    #[test]
    fn structured_count_matches_text() {
        let (_, text, _) = run_str(&["count"]);
        let (_, json_out, _) = run_str(&["count", "--format", "structured"]);
        let doc: serde_json::Value = serde_json::from_str(&json_out).unwrap();
        assert_eq!(doc["orbit_count"], 225);
        for n in ["1680", "228", "225", "450"] {
            assert!(text.contains(n), "{text}");
        }
    }

    #[test]
    fn verify_reports_failures() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "fixture broken\nanchor Loop mislabeled\nstart ..ooxxx.o:x\nclaim VALUE_IS WIN\n").unwrap();
        let (code, out, _) = run_str(&["verify", "--fixtures", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_FAILURE);
        assert!(out.contains("FAIL  broken  Loop mislabeled"), "{out}");
        assert!(out.contains("VALUE_IS WIN"), "{out}");
    }

    #[test]
    fn sweep_skips_invalid_and_oversized() {
        let rows = sweep(3..=4, 3..=4, 2000, None);
        let get = |k, s| rows.iter().find(|r| r.k == k && r.s == s).unwrap();
        assert_eq!(get(3, 3).root.as_deref(), Some("WIN"));
        assert_eq!(get(3, 4).root.as_deref(), Some("DRAW"));
        assert!(get(4, 3).skipped.is_some());
        assert!(get(4, 4).skipped.is_none());
        let tight = sweep(3..=3, 4..=4, 100, None);
        assert!(tight[0].skipped.as_deref().unwrap().contains("guard"));
    }
}
