//! Replayable proof lines.
//!
//! A [`ProofFixture`] is a start position, a sequence of moves and a list of
//! claims about the positions along the way. [`replay`] plays the moves with
//! the rules engine and checks every claim against a solved table.
//!
//! Fixtures are written in a small text format:
//!
//! ```text
//! # comment
//! fixture intro.race
//! anchor Race: X to move wins in two moves
//! start ..o.xoxox:x
//! claim VALUE_IS WIN
//! claim DEPTH_AT_MOST 3
//! ```
//!
//! Move lines are `place N` or `slide A B`, optionally prefixed by the
//! acting player. Claims are `VALUE_IS V`, `VALUE_IS_NOT V`,
//! `RETURNS_TO_START`, `TERMINAL_WIN_BY P` and `DEPTH_AT_MOST N`, where `V`
//! is `WIN`, `LOSS`, `DRAW` or an exact value such as `LOSS(2)`. A trailing
//! `@N` evaluates the claim after the first `N` moves; without it the claim
//! applies to the final position.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::board::{BoardSpec, Node};
use crate::position::{Move, Player, Position, PositionError};
use crate::solver::{best_moves, GameValue, RankedMove, SolveError, SolveTable, ValueClass};

const BUILTIN: &str = include_str!("../fixtures/proofs.txt");

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("fixture file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("fixture {fixture}: start position: {source}")]
    Start { fixture: String, source: PositionError },
    #[error("fixture {fixture}: move {step} ({mv}): {source}")]
    IllegalMove {
        fixture: String,
        step: usize,
        mv: Move,
        source: PositionError,
    },
    #[error("fixture {fixture}: move {step} is played by {actor} but {mover} is to move")]
    WrongActor {
        fixture: String,
        step: usize,
        actor: Player,
        mover: Player,
    },
    #[error("fixture {fixture}: claim refers to step {step} but only {moves} moves are given")]
    StepOutOfRange { fixture: String, step: usize, moves: usize },
    #[error("fixture {fixture}: {source}")]
    Solve { fixture: String, source: SolveError },
}

/// A value pattern: a whole class or one exact value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuePattern {
    Class(ValueClass),
    Exact(GameValue),
}

impl ValuePattern {
    pub fn matches(self, v: GameValue) -> bool {
        match self {
            ValuePattern::Class(c) => v.class() == c,
            ValuePattern::Exact(e) => v == e,
        }
    }
}

impl fmt::Display for ValuePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuePattern::Class(c) => c.fmt(f),
            ValuePattern::Exact(v) => v.fmt(f),
        }
    }
}

impl FromStr for ValuePattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let class = |name: &str| match name {
            "WIN" => Ok(ValueClass::Win),
            "LOSS" => Ok(ValueClass::Loss),
            "DRAW" => Ok(ValueClass::Draw),
            other => Err(format!("unknown value {other:?}")),
        };
        let Some((name, rest)) = s.split_once('(') else {
            return class(s).map(ValuePattern::Class);
        };
        let depth: u32 = rest
            .strip_suffix(')')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| format!("bad value depth in {s:?}"))?;
        match class(name)? {
            ValueClass::Win => Ok(ValuePattern::Exact(GameValue::Win(depth))),
            ValueClass::Loss => Ok(ValuePattern::Exact(GameValue::Loss(depth))),
            ValueClass::Draw => Err("DRAW takes no depth".to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimKind {
    ValueIs(ValuePattern),
    ValueIsNot(ValuePattern),
    ReturnsToStart,
    TerminalWinBy(Player),
    DepthAtMost(u32),
}

impl fmt::Display for ClaimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClaimKind::ValueIs(v) => write!(f, "VALUE_IS {v}"),
            ClaimKind::ValueIsNot(v) => write!(f, "VALUE_IS_NOT {v}"),
            ClaimKind::ReturnsToStart => f.write_str("RETURNS_TO_START"),
            ClaimKind::TerminalWinBy(p) => write!(f, "TERMINAL_WIN_BY {p}"),
            ClaimKind::DepthAtMost(d) => write!(f, "DEPTH_AT_MOST {d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Claim {
    pub kind: ClaimKind,
    /// Number of moves played before the claim is checked; `None` means all.
    pub step: Option<usize>,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(n) => write!(f, "{} @{n}", self.kind),
            None => self.kind.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofFixture {
    pub name: String,
    pub anchor: String,
    pub start: String,
    /// Moves with the player who is expected to make them, if stated.
    pub moves: Vec<(Option<Player>, Move)>,
    pub claims: Vec<Claim>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimOutcome {
    pub claim: String,
    pub position: String,
    pub passed: bool,
    pub detail: String,
    /// For a failed value claim, the mover's best reply at the claimed
    /// position, which refutes the claim.
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureReport {
    pub name: String,
    pub anchor: String,
    pub end: String,
    pub claims: Vec<ClaimOutcome>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClaimOutcome> {
        self.claims.iter().filter(|c| !c.passed)
    }
}

/// Parses a fixture file.
pub fn parse_fixtures(text: &str) -> Result<Vec<ProofFixture>, VerifyError> {
    let mut out: Vec<ProofFixture> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| VerifyError::Parse { line: i + 1, reason };
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        if head == "fixture" {
            if rest.is_empty() {
                return Err(err("fixture needs a name".into()));
            }
            if out.iter().any(|f| f.name == rest) {
                return Err(err(format!("duplicate fixture name {rest}")));
            }
            out.push(ProofFixture {
                name: rest.to_string(),
                anchor: String::new(),
                start: String::new(),
                moves: Vec::new(),
                claims: Vec::new(),
            });
            continue;
        }
        let current = out
            .last_mut()
            .ok_or_else(|| err(format!("{head:?} before any fixture line")))?;
        match head {
            "anchor" => current.anchor = rest.to_string(),
            "start" => current.start = rest.to_string(),
            "claim" => current.claims.push(parse_claim(rest).map_err(err)?),
            _ => current.moves.push(parse_move_line(line).map_err(err)?),
        }
    }
    for f in &out {
        if f.start.is_empty() {
            return Err(VerifyError::Parse {
                line: 0,
                reason: format!("fixture {} has no start position", f.name),
            });
        }
    }
    Ok(out)
}

fn parse_node(s: &str) -> Result<Node, String> {
    s.parse().map_err(|_| format!("bad node {s:?}"))
}

fn parse_move_line(line: &str) -> Result<(Option<Player>, Move), String> {
    let mut words: Vec<&str> = line.split_whitespace().collect();
    let actor = match words.first().and_then(|w| w.parse::<char>().ok()) {
        Some(c) => Player::from_symbol(c),
        None => None,
    };
    if actor.is_some() {
        words.remove(0);
    }
    let mv = match words[..] {
        ["place", to] => Move::Place(parse_node(to)?),
        ["slide", from, to] => Move::Slide { from: parse_node(from)?, to: parse_node(to)? },
        _ => return Err(format!("unrecognized line {line:?}")),
    };
    Ok((actor, mv))
}

fn parse_claim(text: &str) -> Result<Claim, String> {
    let mut words: Vec<&str> = text.split_whitespace().collect();
    let step = match words.last().and_then(|w| w.strip_prefix('@')) {
        Some(n) => {
            let n = n.parse().map_err(|_| format!("bad step {n:?}"))?;
            words.pop();
            Some(n)
        }
        None => None,
    };
    let kind = match words[..] {
        ["VALUE_IS", v] => ClaimKind::ValueIs(v.parse()?),
        ["VALUE_IS_NOT", v] => ClaimKind::ValueIsNot(v.parse()?),
        ["RETURNS_TO_START"] => ClaimKind::ReturnsToStart,
        ["TERMINAL_WIN_BY", p] => ClaimKind::TerminalWinBy(
            p.parse::<char>()
                .ok()
                .and_then(|c| Player::from_symbol(c.to_ascii_lowercase()))
                .ok_or_else(|| format!("bad player {p:?}"))?,
        ),
        ["DEPTH_AT_MOST", d] => {
            ClaimKind::DepthAtMost(d.parse().map_err(|_| format!("bad depth {d:?}"))?)
        }
        _ => return Err(format!("unrecognized claim {text:?}")),
    };
    Ok(Claim { kind, step })
}

/// The fixtures shipped with the crate, covering the Picaria (3,4) proofs.
pub fn builtin_fixtures() -> Vec<ProofFixture> {
    parse_fixtures(BUILTIN).expect("builtin fixture file parses")
}

/// Plays a fixture's moves and checks each of its claims.
///
/// Illegal moves and out-of-range claim steps are authoring errors and come
/// back as `Err`; a claim that is simply false is reported in the result.
pub fn replay(
    spec: &BoardSpec,
    table: &SolveTable,
    fixture: &ProofFixture,
) -> Result<FixtureReport, VerifyError> {
    let start = spec
        .parse_position(&fixture.start)
        .map_err(|source| VerifyError::Start { fixture: fixture.name.clone(), source })?;
    let mut line = vec![start];
    for (i, &(actor, mv)) in fixture.moves.iter().enumerate() {
        let p = line[i];
        if let Some(actor) = actor {
            if actor != p.to_move() {
                return Err(VerifyError::WrongActor {
                    fixture: fixture.name.clone(),
                    step: i + 1,
                    actor,
                    mover: p.to_move(),
                });
            }
        }
        let next = p.apply_move(spec, mv).map_err(|source| VerifyError::IllegalMove {
            fixture: fixture.name.clone(),
            step: i + 1,
            mv,
            source,
        })?;
        line.push(next);
    }

    let solve_err = |source| VerifyError::Solve { fixture: fixture.name.clone(), source };
    let mut claims = Vec::with_capacity(fixture.claims.len());
    for claim in &fixture.claims {
        let step = claim.step.unwrap_or(fixture.moves.len());
        let p = *line.get(step).ok_or_else(|| VerifyError::StepOutOfRange {
            fixture: fixture.name.clone(),
            step,
            moves: fixture.moves.len(),
        })?;
        let mut counterexample = None;
        let (passed, detail) = match claim.kind {
            ClaimKind::ReturnsToStart => {
                let same = spec.canonical(&p) == spec.canonical(&start);
                (same, format!("{} vs start {}", spec.format_position(&p), fixture.start))
            }
            ClaimKind::TerminalWinBy(who) => {
                let winner = p.winner(spec).map_err(|e| solve_err(e.into()))?;
                let shown = winner.map_or("nobody".to_string(), |w| w.to_string());
                (winner == Some(who), format!("line held by {shown}"))
            }
            kind => {
                let v = table.value(spec, &p).map_err(solve_err)?;
                let passed = match kind {
                    ClaimKind::ValueIs(pat) => pat.matches(v),
                    ClaimKind::ValueIsNot(pat) => !pat.matches(v),
                    ClaimKind::DepthAtMost(d) => v.depth().is_some_and(|x| x <= d),
                    _ => unreachable!(),
                };
                if !passed {
                    counterexample = refutation(spec, table, &p).map_err(solve_err)?;
                }
                (passed, format!("{} to move, value {v}", p.to_move()))
            }
        };
        claims.push(ClaimOutcome {
            claim: claim.to_string(),
            position: spec.format_position(&p),
            passed,
            detail,
            counterexample,
        });
    }
    Ok(FixtureReport {
        name: fixture.name.clone(),
        anchor: fixture.anchor.clone(),
        end: spec.format_position(line.last().expect("line holds the start")),
        claims,
    })
}

fn refutation(
    spec: &BoardSpec,
    table: &SolveTable,
    p: &Position,
) -> Result<Option<String>, SolveError> {
    if p.winner(spec)?.is_some() {
        return Ok(None);
    }
    let best: Option<RankedMove> = best_moves(spec, table, p)?.into_iter().next();
    Ok(best.map(|r| format!("{} {} -> {} ({})", p.to_move(), r.mv, r.for_mover(), spec.format_position(&p.apply_unchecked(r.mv)))))
}
