//! Text serialization of solve tables.
//!
//! ```text
//! PICARIA-SOLVE-TABLE
//! version 1
//! k 3
//! s 4
//! entries 5487
//! checksum 1a2b3c4d
//! ........x o D 0
//! ...
//! ```
//!
//! Entries are sorted by cell string (bytewise), one per line:
//! `<cells> <mover> <W|L|D> <depth>`, with depth 0 for draws. The checksum
//! is the CRC-32 of the entry lines, newlines included, as 8 lowercase hex
//! digits. Lines end in `\n` on every platform.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use super::{check_local_consistency, solve, GameValue, SolveTable};
use crate::board::BoardSpec;
use crate::position::{Player, Position};

pub const MAGIC: &str = "PICARIA-SOLVE-TABLE";
pub const FORMAT_VERSION: u32 = 1;

/// Entries re-derived from their children on import.
const VALIDATION_SAMPLE: usize = 1000;

#[derive(Debug, Error)]
pub enum TableIoError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a solve table (bad magic line)")]
    Magic,
    #[error("unsupported table format version {found} (expected {FORMAT_VERSION})")]
    Version { found: String },
    #[error("table is for (k={k}, s={s}) but the board is (k={want_k}, s={want_s})")]
    SpecMismatch { k: u8, s: u8, want_k: u8, want_s: u8 },
    #[error("malformed table header line {line}: {text:?}")]
    Header { line: usize, text: String },
    #[error("checksum mismatch: header says {expected}, payload hashes to {actual}")]
    Checksum { expected: String, actual: String },
    #[error("malformed entry on line {line}: {reason}")]
    Entry { line: usize, reason: String },
    #[error("header announces {expected} entries, found {found}")]
    Count { expected: usize, found: usize },
    #[error("table fails the minimax check: {0}")]
    Inconsistent(String),
}

fn entry_line(spec_nodes: usize, p: &Position, v: GameValue) -> String {
    let cells: String = (0..spec_nodes as u8).map(|n| p.cell(n).symbol()).collect();
    format!("{cells} {} {} {}\n", p.to_move().symbol(), v.tag(), v.depth().unwrap_or(0))
}

/// Writes the table in the text format described in the module docs.
pub fn write_table(table: &SolveTable, out: &mut impl Write) -> io::Result<()> {
    let nodes = 2 * table.s() as usize + 1;
    let mut lines: Vec<String> = table.iter().map(|(p, v)| entry_line(nodes, &p, v)).collect();
    lines.sort_unstable();
    let mut hasher = crc32fast::Hasher::new();
    for l in &lines {
        hasher.update(l.as_bytes());
    }
    write!(
        out,
        "{MAGIC}\nversion {FORMAT_VERSION}\nk {}\ns {}\nentries {}\nchecksum {:08x}\n",
        table.k(),
        table.s(),
        lines.len(),
        hasher.finalize()
    )?;
    for l in &lines {
        out.write_all(l.as_bytes())?;
    }
    Ok(())
}

pub fn export_table(table: &SolveTable, path: &Path) -> Result<(), TableIoError> {
    let mut buf = Vec::new();
    write_table(table, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn import_table(path: &Path, spec: &BoardSpec) -> Result<SolveTable, TableIoError> {
    let file = fs::File::open(path)?;
    read_table(io::BufReader::new(file), spec)
}

/// Reads and validates a table for `spec`.
pub fn read_table(input: impl BufRead, spec: &BoardSpec) -> Result<SolveTable, TableIoError> {
    let mut lines = input.lines().enumerate();
    let mut header = |key: &str| -> Result<String, TableIoError> {
        let (i, line) = lines.next().ok_or(TableIoError::Header {
            line: 0,
            text: format!("missing {key}"),
        })?;
        let line = line?;
        if key == "magic" {
            return if line == MAGIC { Ok(line) } else { Err(TableIoError::Magic) };
        }
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.to_string()),
            _ => Err(TableIoError::Header { line: i + 1, text: line }),
        }
    };
    header("magic")?;
    let version = header("version")?;
    if version != FORMAT_VERSION.to_string() {
        return Err(TableIoError::Version { found: version });
    }
    let bad_number = |text: String| TableIoError::Header { line: 0, text };
    let k: u8 = header("k").and_then(|v| v.parse().map_err(|_| bad_number(v)))?;
    let s: u8 = header("s").and_then(|v| v.parse().map_err(|_| bad_number(v)))?;
    if k != spec.k() || s != spec.s() {
        return Err(TableIoError::SpecMismatch { k, s, want_k: spec.k(), want_s: spec.s() });
    }
    let expected: usize = header("entries").and_then(|v| v.parse().map_err(|_| bad_number(v)))?;
    let checksum = header("checksum")?;

    let mut hasher = crc32fast::Hasher::new();
    let mut entries = FxHashMap::default();
    for (i, line) in lines {
        let line = line?;
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        let (p, v) = parse_entry(spec, &line).map_err(|reason| TableIoError::Entry {
            line: i + 1,
            reason,
        })?;
        entries.insert(p.pack(), v);
    }
    let actual = format!("{:08x}", hasher.finalize());
    if actual != checksum {
        return Err(TableIoError::Checksum { expected: checksum, actual });
    }
    if entries.len() != expected {
        return Err(TableIoError::Count { expected, found: entries.len() });
    }

    let table = SolveTable::from_entries(k, s, entries);
    let keys: Vec<Position> = table.iter().map(|(p, _)| p).collect();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for p in keys.choose_multiple(&mut rng, VALIDATION_SAMPLE) {
        check_local_consistency(spec, &table, p).map_err(TableIoError::Inconsistent)?;
    }
    Ok(table)
}

/// Where a table handed out by [`solve_cached`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableSource {
    Solved,
    Cache,
}

/// Cache file for one board, keyed by `(k, s)` and the format version.
pub fn cache_file(dir: &Path, spec: &BoardSpec) -> PathBuf {
    dir.join(format!("picaria-k{}-s{}-v{FORMAT_VERSION}.table", spec.k(), spec.s()))
}

/// Loads the table for `spec` from the cache directory, or solves it and
/// stores the result there. A cached file that fails validation is
/// replaced. Without a directory this is just [`solve`].
pub fn solve_cached(
    spec: &BoardSpec,
    dir: Option<&Path>,
) -> Result<(SolveTable, TableSource), TableIoError> {
    let Some(dir) = dir else {
        return Ok((solve(spec), TableSource::Solved));
    };
    let path = cache_file(dir, spec);
    if path.is_file() {
        if let Ok(table) = import_table(&path, spec) {
            return Ok((table, TableSource::Cache));
        }
    }
    let table = solve(spec);
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    export_table(&table, &tmp)?;
    fs::rename(&tmp, &path)?;
    Ok((table, TableSource::Solved))
}

fn parse_entry(spec: &BoardSpec, line: &str) -> Result<(Position, GameValue), String> {
    let fields: Vec<&str> = line.split(' ').collect();
    let [cells, mover, tag, depth] = fields[..] else {
        return Err(format!("expected 4 fields, found {}", fields.len()));
    };
    let mover = match mover {
        "x" => Player::X,
        "o" => Player::O,
        other => return Err(format!("bad mover {other:?}")),
    };
    if cells.len() != spec.node_count() {
        return Err(format!("expected {} cells", spec.node_count()));
    }
    let (mut x, mut o) = (0u32, 0u32);
    for (i, c) in cells.bytes().enumerate() {
        match c {
            b'.' => {}
            b'x' => x |= 1 << i,
            b'o' => o |= 1 << i,
            _ => return Err(format!("bad cell {:?}", c as char)),
        }
    }
    let p = Position::from_masks(x, o, mover);
    if spec.canonical(&p) != p {
        return Err(format!("{cells} is not in canonical form"));
    }
    let depth: u32 = depth.parse().map_err(|_| format!("bad depth {depth:?}"))?;
    let v = match tag {
        "W" => GameValue::Win(depth),
        "L" => GameValue::Loss(depth),
        "D" if depth == 0 => GameValue::Draw,
        _ => return Err(format!("bad value {tag} {depth}")),
    };
    Ok((p, v))
}
