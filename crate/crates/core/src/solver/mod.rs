//! Exact solution of the whole two-phase game graph.
//!
//! [`solve`] enumerates every position reachable from the empty board (one
//! representative per symmetry orbit), then labels the graph backwards from
//! its terminal positions. Positions that never receive a label are draws:
//! neither side can force a line, so play cycles forever.

mod oracle;
mod table_io;

use std::collections::VecDeque;
use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::board::BoardSpec;
use crate::position::{Move, Phase, Player, Position, PositionError};

pub use oracle::oracle_solve;
pub use table_io::{
    cache_file, export_table, import_table, read_table, solve_cached, write_table, TableIoError,
    TableSource, FORMAT_VERSION, MAGIC,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("position {0} is not reachable on this board")]
    Unknown(String),
    #[error(transparent)]
    Position(#[from] PositionError),
}

/// Game-theoretic value for the side to move.
///
/// Depths count plies. The winner plays for the shortest win and the loser
/// for the longest loss, so wins always have odd depth and losses even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameValue {
    Win(u32),
    Loss(u32),
    Draw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ValueClass {
    Win,
    Loss,
    Draw,
}

impl GameValue {
    pub fn class(self) -> ValueClass {
        match self {
            GameValue::Win(_) => ValueClass::Win,
            GameValue::Loss(_) => ValueClass::Loss,
            GameValue::Draw => ValueClass::Draw,
        }
    }

    pub fn depth(self) -> Option<u32> {
        match self {
            GameValue::Win(d) | GameValue::Loss(d) => Some(d),
            GameValue::Draw => None,
        }
    }

    /// The value one ply earlier, for the player who moved into this one.
    pub fn parent_view(self) -> GameValue {
        match self {
            GameValue::Win(d) => GameValue::Loss(d + 1),
            GameValue::Loss(d) => GameValue::Win(d + 1),
            GameValue::Draw => GameValue::Draw,
        }
    }

    /// Sort key for the mover: lower is better. Quick wins first, then
    /// draws, then slow losses.
    pub fn preference(self) -> (u8, i64) {
        match self {
            GameValue::Win(d) => (0, d as i64),
            GameValue::Draw => (1, 0),
            GameValue::Loss(d) => (2, -(d as i64)),
        }
    }

    pub fn tag(self) -> char {
        match self {
            GameValue::Win(_) => 'W',
            GameValue::Loss(_) => 'L',
            GameValue::Draw => 'D',
        }
    }
}

impl fmt::Display for GameValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameValue::Win(d) => write!(f, "WIN({d})"),
            GameValue::Loss(d) => write!(f, "LOSS({d})"),
            GameValue::Draw => f.write_str("DRAW"),
        }
    }
}

impl fmt::Display for ValueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueClass::Win => f.write_str("WIN"),
            ValueClass::Loss => f.write_str("LOSS"),
            ValueClass::Draw => f.write_str("DRAW"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ValueCounts {
    pub win: usize,
    pub loss: usize,
    pub draw: usize,
}

/// Canonical position → value, for every position reachable on one board.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveTable {
    k: u8,
    s: u8,
    entries: FxHashMap<u64, GameValue>,
}

impl SolveTable {
    pub(crate) fn from_entries(k: u8, s: u8, entries: FxHashMap<u64, GameValue>) -> Self {
        SolveTable { k, s, entries }
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn s(&self) -> u8 {
        self.s
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value of a position already in canonical form.
    pub fn get_canonical(&self, p: &Position) -> Option<GameValue> {
        self.entries.get(&p.pack()).copied()
    }

    /// Value of any position on the table's board.
    pub fn value(&self, spec: &BoardSpec, p: &Position) -> Result<GameValue, SolveError> {
        self.get_canonical(&spec.canonical(p))
            .ok_or_else(|| SolveError::Unknown(spec.format_position(p)))
    }

    /// Entries in ascending packed order.
    pub fn iter(&self) -> impl Iterator<Item = (Position, GameValue)> + '_ {
        let mut keys: Vec<u64> = self.entries.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter().map(|k| (Position::unpack(k), self.entries[&k]))
    }

    pub fn counts(&self) -> ValueCounts {
        let mut c = ValueCounts::default();
        for v in self.entries.values() {
            match v {
                GameValue::Win(_) => c.win += 1,
                GameValue::Loss(_) => c.loss += 1,
                GameValue::Draw => c.draw += 1,
            }
        }
        c
    }

    /// Largest win and loss depth present.
    pub fn max_depths(&self) -> (u32, u32) {
        self.entries.values().fold((0, 0), |(w, l), v| match v {
            GameValue::Win(d) => (w.max(*d), l),
            GameValue::Loss(d) => (w, l.max(*d)),
            GameValue::Draw => (w, l),
        })
    }

    pub fn matches(&self, spec: &BoardSpec) -> bool {
        self.k == spec.k() && self.s == spec.s()
    }
}

/// Canonical successors of a position, deduplicated and in ascending order.
/// Terminal positions have none.
pub(crate) fn canonical_children(spec: &BoardSpec, p: &Position) -> Vec<Position> {
    if spec.has_line(p.x_mask()) || spec.has_line(p.o_mask()) {
        return Vec::new();
    }
    let mut kids: Vec<Position> = p
        .moves_unchecked(spec)
        .into_iter()
        .map(|m| spec.canonical(&p.apply_unchecked(m)))
        .collect();
    kids.sort_unstable_by_key(Position::pack);
    kids.dedup();
    kids
}

/// The reachable canonical state graph in breadth-first order.
pub(crate) struct StateGraph {
    pub states: Vec<Position>,
    /// CSR successor lists.
    pub child_start: Vec<u32>,
    pub children: Vec<u32>,
}

impl StateGraph {
    pub fn build(spec: &BoardSpec) -> Self {
        let root = spec.canonical(&spec.initial_position());
        let mut states = vec![root];
        let mut index = FxHashMap::default();
        index.insert(root.pack(), 0u32);
        let mut child_start = vec![0u32];
        let mut children = Vec::new();
        let mut next = 0;
        while next < states.len() {
            let p = states[next];
            for c in canonical_children(spec, &p) {
                let id = *index.entry(c.pack()).or_insert_with(|| {
                    states.push(c);
                    (states.len() - 1) as u32
                });
                children.push(id);
            }
            child_start.push(children.len() as u32);
            next += 1;
        }
        StateGraph { states, child_start, children }
    }

    pub fn children_of(&self, i: usize) -> &[u32] {
        &self.children[self.child_start[i] as usize..self.child_start[i + 1] as usize]
    }

    fn parents(&self) -> (Vec<u32>, Vec<u32>) {
        let n = self.states.len();
        let mut count = vec![0u32; n + 1];
        for &c in &self.children {
            count[c as usize + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let start = count.clone();
        let mut fill = count;
        let mut parents = vec![0u32; self.children.len()];
        for p in 0..n {
            for &c in self.children_of(p) {
                parents[fill[c as usize] as usize] = p as u32;
                fill[c as usize] += 1;
            }
        }
        (start, parents)
    }
}

/// Solves every reachable position by backward labeling.
///
/// Terminal positions (the opponent has just completed a line) and blocked
/// positions (the mover has no slide) are losses at depth 0. A position is a
/// win one ply after its quickest losing child, and a loss one ply after its
/// slowest child once every child is a win. The queue is processed in
/// nondecreasing depth order, which makes both depths exact.
pub fn solve(spec: &BoardSpec) -> SolveTable {
    let graph = StateGraph::build(spec);
    let n = graph.states.len();
    let (parent_start, parents) = graph.parents();

    let mut value: Vec<Option<GameValue>> = vec![None; n];
    let mut pending: Vec<u32> = (0..n).map(|i| graph.children_of(i).len() as u32).collect();
    let mut queue = VecDeque::new();
    for (i, v) in value.iter_mut().enumerate() {
        if pending[i] == 0 {
            *v = Some(GameValue::Loss(0));
            queue.push_back(i as u32);
        }
    }

    while let Some(c) = queue.pop_front() {
        let cv = value[c as usize].expect("queued states are labeled");
        let range = parent_start[c as usize] as usize..parent_start[c as usize + 1] as usize;
        for &p in &parents[range] {
            let p = p as usize;
            if value[p].is_some() {
                continue;
            }
            match cv {
                GameValue::Loss(d) => {
                    value[p] = Some(GameValue::Win(d + 1));
                    queue.push_back(p as u32);
                }
                GameValue::Win(d) => {
                    pending[p] -= 1;
                    if pending[p] == 0 {
                        value[p] = Some(GameValue::Loss(d + 1));
                        queue.push_back(p as u32);
                    }
                }
                GameValue::Draw => unreachable!("draws are never queued"),
            }
        }
    }

    let entries = graph
        .states
        .iter()
        .zip(value)
        .map(|(p, v)| (p.pack(), v.unwrap_or(GameValue::Draw)))
        .collect();
    SolveTable::from_entries(spec.k(), spec.s(), entries)
}

/// A legal move with the value of the position it leads to (for the
/// opponent, who moves next).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankedMove {
    pub mv: Move,
    pub after: GameValue,
}

impl RankedMove {
    /// The move's value from the mover's point of view.
    pub fn for_mover(&self) -> GameValue {
        self.after.parent_view()
    }
}

/// Legal moves ordered best-first for the mover; ties keep move order.
pub fn best_moves(
    spec: &BoardSpec,
    table: &SolveTable,
    p: &Position,
) -> Result<Vec<RankedMove>, SolveError> {
    let mut ranked = p
        .legal_moves(spec)?
        .into_iter()
        .map(|mv| {
            let next = p.apply_unchecked(mv);
            Ok(RankedMove { mv, after: table.value(spec, &next)? })
        })
        .collect::<Result<Vec<_>, SolveError>>()?;
    ranked.sort_by_key(|r| r.for_mover().preference());
    Ok(ranked)
}

/// Checks a table entry against the minimax recurrence over its children.
pub fn check_local_consistency(
    spec: &BoardSpec,
    table: &SolveTable,
    p: &Position,
) -> Result<(), String> {
    let show = |q: &Position| spec.format_position(q);
    let v = table
        .get_canonical(p)
        .ok_or_else(|| format!("{} missing from table", show(p)))?;
    let kids = canonical_children(spec, p);
    let mut child_values = Vec::with_capacity(kids.len());
    for c in &kids {
        child_values.push(
            table
                .get_canonical(c)
                .ok_or_else(|| format!("child {} of {} missing", show(c), show(p)))?,
        );
    }
    let min_loss = child_values.iter().filter_map(|v| match v {
        GameValue::Loss(d) => Some(*d),
        _ => None,
    }).min();
    let all_win = child_values.iter().all(|v| matches!(v, GameValue::Win(_)));
    let max_win = child_values.iter().filter_map(|v| v.depth()).max();
    let expected = if kids.is_empty() {
        GameValue::Loss(0)
    } else if let Some(d) = min_loss {
        GameValue::Win(d + 1)
    } else if all_win {
        GameValue::Loss(max_win.unwrap_or(0) + 1)
    } else {
        GameValue::Draw
    };
    if v != expected {
        return Err(format!("{}: stored {v}, children imply {expected}", show(p)));
    }
    Ok(())
}

/// Sizes of the reachable state space.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReachStats {
    pub canonical_placement: usize,
    pub canonical_sliding: usize,
    pub raw_placement: usize,
    pub raw_sliding: usize,
    /// Distinct full boards (no turn flag, no symmetry) seen in raw play.
    pub raw_sliding_boards: usize,
}

impl ReachStats {
    pub fn canonical_total(&self) -> usize {
        self.canonical_placement + self.canonical_sliding
    }

    pub fn raw_total(&self) -> usize {
        self.raw_placement + self.raw_sliding
    }
}

/// Forward closure of the initial position, with and without symmetry
/// reduction.
pub fn reachable_states(spec: &BoardSpec) -> ReachStats {
    let graph = StateGraph::build(spec);
    let mut stats = ReachStats::default();
    for p in &graph.states {
        match p.phase(spec) {
            Phase::Placement => stats.canonical_placement += 1,
            Phase::Sliding => stats.canonical_sliding += 1,
        }
    }
    let raw = oracle::RawGraph::build(spec);
    let mut boards = rustc_hash::FxHashSet::default();
    for p in &raw.states {
        match p.phase(spec) {
            Phase::Placement => stats.raw_placement += 1,
            Phase::Sliding => {
                stats.raw_sliding += 1;
                boards.insert(p.with_mover(Player::X).pack());
            }
        }
    }
    stats.raw_sliding_boards = boards.len();
    stats
}

/// The reachable canonical positions themselves, in breadth-first order.
pub fn reachable_positions(spec: &BoardSpec) -> Vec<Position> {
    StateGraph::build(spec).states
}
