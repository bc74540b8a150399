//! Positions, moves, rules and the wire notation.
//!
//! A position is stored as one occupancy bitmask per color plus the side to
//! move. The wire notation lists every node in index order using `.`, `x`
//! and `o`, followed by `:` and the mover, e.g. the empty Picaria board
//! `.........:x`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{BoardSpec, Node, Symmetry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositionError {
    #[error("malformed position {text:?}: {reason}")]
    Malformed { text: String, reason: String },
    #[error("invalid position {text:?}: {reason}")]
    Invalid { text: String, reason: String },
    #[error("both players hold a complete line")]
    DoubleWin,
    #[error("position is over, {0} already holds a line")]
    Terminal(Player),
    #[error("illegal move {mv}: {reason}")]
    IllegalMove { mv: Move, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    X,
    O,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::X => Player::O,
            Player::O => Player::X,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Player::X => 'x',
            Player::O => 'o',
        }
    }

    pub fn from_symbol(c: char) -> Option<Player> {
        match c {
            'x' | 'X' => Some(Player::X),
            'o' | 'O' => Some(Player::O),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::X => f.write_str("X"),
            Player::O => f.write_str("O"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Empty,
    X,
    O,
}

impl Cell {
    pub fn symbol(self) -> char {
        match self {
            Cell::Empty => '.',
            Cell::X => 'x',
            Cell::O => 'o',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Placement,
    Sliding,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Placement => f.write_str("placement"),
            Phase::Sliding => f.write_str("sliding"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Place(Node),
    Slide { from: Node, to: Node },
}

impl Move {
    pub fn to(self) -> Node {
        match self {
            Move::Place(to) | Move::Slide { to, .. } => to,
        }
    }

    pub fn from(self) -> Option<Node> {
        match self {
            Move::Place(_) => None,
            Move::Slide { from, .. } => Some(from),
        }
    }

    /// Image of the move under a board symmetry.
    pub fn transform(self, g: &Symmetry) -> Move {
        match self {
            Move::Place(to) => Move::Place(g.perm[to as usize]),
            Move::Slide { from, to } => Move::Slide {
                from: g.perm[from as usize],
                to: g.perm[to as usize],
            },
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Place(to) => write!(f, "place {to}"),
            Move::Slide { from, to } => write!(f, "slide {from} {to}"),
        }
    }
}

/// Board occupancy plus the side to move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Position {
    x: u32,
    o: u32,
    to_move: Player,
}

impl Position {
    pub fn initial() -> Self {
        Position { x: 0, o: 0, to_move: Player::X }
    }

    /// Builds a position from raw masks without validation.
    pub fn from_masks(x: u32, o: u32, to_move: Player) -> Self {
        debug_assert_eq!(x & o, 0, "a node holds at most one stone");
        Position { x, o, to_move }
    }

    pub fn x_mask(&self) -> u32 {
        self.x
    }

    pub fn o_mask(&self) -> u32 {
        self.o
    }

    pub fn mask(&self, p: Player) -> u32 {
        match p {
            Player::X => self.x,
            Player::O => self.o,
        }
    }

    pub fn occupied(&self) -> u32 {
        self.x | self.o
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn with_mover(self, to_move: Player) -> Self {
        Position { to_move, ..self }
    }

    pub fn count(&self, p: Player) -> u32 {
        self.mask(p).count_ones()
    }

    pub fn cell(&self, n: Node) -> Cell {
        let bit = 1u32 << n;
        if self.x & bit != 0 {
            Cell::X
        } else if self.o & bit != 0 {
            Cell::O
        } else {
            Cell::Empty
        }
    }

    pub fn cells(&self, spec: &BoardSpec) -> Vec<Cell> {
        (0..spec.node_count() as Node).map(|n| self.cell(n)).collect()
    }

    pub fn phase(&self, spec: &BoardSpec) -> Phase {
        if self.occupied().count_ones() < 2 * spec.k() as u32 {
            Phase::Placement
        } else {
            Phase::Sliding
        }
    }

    /// Packs the position into one word: X in bits 0..31, O in bits 31..62,
    /// the mover in bit 63.
    pub fn pack(&self) -> u64 {
        let mover = match self.to_move {
            Player::X => 0,
            Player::O => 1u64 << 63,
        };
        self.x as u64 | (self.o as u64) << 31 | mover
    }

    pub fn unpack(word: u64) -> Self {
        const MASK: u64 = (1 << 31) - 1;
        Position {
            x: (word & MASK) as u32,
            o: ((word >> 31) & MASK) as u32,
            to_move: if word >> 63 == 1 { Player::O } else { Player::X },
        }
    }

    /// The player holding a complete line, if any.
    pub fn winner(&self, spec: &BoardSpec) -> Result<Option<Player>, PositionError> {
        match (spec.has_line(self.x), spec.has_line(self.o)) {
            (true, true) => Err(PositionError::DoubleWin),
            (true, false) => Ok(Some(Player::X)),
            (false, true) => Ok(Some(Player::O)),
            (false, false) => Ok(None),
        }
    }

    /// Every legal move for the side to move, in ascending node order.
    pub fn legal_moves(&self, spec: &BoardSpec) -> Result<Vec<Move>, PositionError> {
        if let Some(w) = self.winner(spec)? {
            return Err(PositionError::Terminal(w));
        }
        Ok(self.moves_unchecked(spec))
    }

    /// Move generation without the terminal check.
    pub(crate) fn moves_unchecked(&self, spec: &BoardSpec) -> Vec<Move> {
        let empty = spec.full_mask() & !self.occupied();
        let own = self.mask(self.to_move);
        let mut moves = Vec::new();
        if own.count_ones() < spec.k() as u32 {
            for_each_bit(empty, |to| moves.push(Move::Place(to)));
        } else {
            for_each_bit(own, |from| {
                for_each_bit(spec.neighbors(from) & empty, |to| {
                    moves.push(Move::Slide { from, to })
                })
            });
        }
        moves
    }

    /// Applies a move that is known to be legal.
    pub(crate) fn apply_unchecked(&self, mv: Move) -> Position {
        let mut next = *self;
        let own = match self.to_move {
            Player::X => &mut next.x,
            Player::O => &mut next.o,
        };
        match mv {
            Move::Place(to) => *own |= 1 << to,
            Move::Slide { from, to } => *own = (*own & !(1 << from)) | 1 << to,
        }
        next.to_move = self.to_move.opponent();
        next
    }

    pub fn apply_move(&self, spec: &BoardSpec, mv: Move) -> Result<Position, PositionError> {
        let legal = self.legal_moves(spec)?;
        if !legal.contains(&mv) {
            return Err(PositionError::IllegalMove {
                mv,
                reason: self.explain_illegal(spec, mv),
            });
        }
        Ok(self.apply_unchecked(mv))
    }

    fn explain_illegal(&self, spec: &BoardSpec, mv: Move) -> String {
        let n = spec.node_count() as Node;
        let own = self.mask(self.to_move);
        let placing = own.count_ones() < spec.k() as u32;
        match mv {
            Move::Place(_) if !placing => {
                format!("{} has placed all stones and must slide", self.to_move)
            }
            Move::Slide { .. } if placing => {
                format!("{} still has stones to place", self.to_move)
            }
            Move::Place(to) if to >= n => format!("node {to} is off the board"),
            Move::Place(to) => format!("node {to} is occupied"),
            Move::Slide { from, to } if from >= n || to >= n => {
                "node is off the board".to_string()
            }
            Move::Slide { from, .. } if own & (1 << from) == 0 => {
                format!("node {from} does not hold a {} stone", self.to_move)
            }
            Move::Slide { from, to } if !spec.is_adjacent(from, to) => {
                format!("nodes {from} and {to} are not adjacent")
            }
            Move::Slide { to, .. } => format!("node {to} is occupied"),
        }
    }

    /// Image of the position under a board symmetry.
    pub fn transform(&self, g: &Symmetry) -> Position {
        Position {
            x: g.apply_mask(self.x),
            o: g.apply_mask(self.o),
            to_move: self.to_move,
        }
    }

    /// Checks the placement/turn consistency and stone-count invariants.
    pub fn validate(&self, spec: &BoardSpec) -> Result<(), String> {
        let (nx, no) = (self.count(Player::X), self.count(Player::O));
        let k = spec.k() as u32;
        if self.x & self.o != 0 {
            return Err("a node holds two stones".into());
        }
        if (self.x | self.o) & !spec.full_mask() != 0 {
            return Err("stone off the board".into());
        }
        if nx > k || no > k {
            return Err(format!("at most {k} stones per player (x={nx}, o={no})"));
        }
        if nx + no < 2 * k {
            if nx != no && nx != no + 1 {
                return Err(format!("placement counts out of turn (x={nx}, o={no})"));
            }
            let expected = if nx == no { Player::X } else { Player::O };
            if self.to_move != expected {
                return Err(format!("{expected} is to move during placement"));
            }
        }
        if spec.has_line(self.x) && spec.has_line(self.o) {
            return Err("both players hold a complete line".into());
        }
        Ok(())
    }
}

/// Calls `f` with the index of every set bit, lowest first.
pub(crate) fn for_each_bit(mut mask: u32, mut f: impl FnMut(Node)) {
    while mask != 0 {
        f(mask.trailing_zeros() as Node);
        mask &= mask - 1;
    }
}

/// Base-3 weight of each node: node 0 is the most significant digit, so
/// smaller keys are lexicographically smaller cell arrays with `. < x < o`.
pub(crate) fn lex_weights(n: usize) -> Vec<u64> {
    (0..n).map(|i| 3u64.pow((n - 1 - i) as u32)).collect()
}

impl BoardSpec {
    pub fn initial_position(&self) -> Position {
        Position::initial()
    }

    /// Orbit representative: the symmetry image with the lexicographically
    /// smallest cell array. Returns the representative and the symmetry that
    /// produces it from `p`.
    pub fn canonicalize<'a>(&'a self, p: &Position) -> (Position, &'a Symmetry) {
        let weights = lex_weights(self.node_count());
        let mut best: Option<(u64, &Symmetry)> = None;
        for g in self.symmetries() {
            let mut key = 0u64;
            for_each_bit(p.x_mask(), |n| key += weights[g.perm[n as usize] as usize]);
            for_each_bit(p.o_mask(), |n| key += 2 * weights[g.perm[n as usize] as usize]);
            if best.is_none_or(|(k, _)| key < k) {
                best = Some((key, g));
            }
        }
        let (_, g) = best.expect("the symmetry group contains the identity");
        (p.transform(g), g)
    }

    pub fn canonical(&self, p: &Position) -> Position {
        self.canonicalize(p).0
    }

    pub fn format_position(&self, p: &Position) -> String {
        let mut s: String = (0..self.node_count() as Node).map(|n| p.cell(n).symbol()).collect();
        s.push(':');
        s.push(p.to_move().symbol());
        s
    }

    /// Parses the wire notation and validates every position invariant.
    pub fn parse_position(&self, text: &str) -> Result<Position, PositionError> {
        let malformed = |reason: String| PositionError::Malformed {
            text: text.to_string(),
            reason,
        };
        let (board, mover) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| malformed("expected <cells>:<mover>".into()))?;
        let mut chars = mover.chars();
        let to_move = match (chars.next().and_then(Player::from_symbol), chars.next()) {
            (Some(p), None) => p,
            _ => return Err(malformed(format!("bad mover {mover:?}"))),
        };
        let cells: Vec<char> = board.chars().collect();
        if cells.len() != self.node_count() {
            return Err(malformed(format!(
                "expected {} cells, found {}",
                self.node_count(),
                cells.len()
            )));
        }
        let (mut x, mut o) = (0u32, 0u32);
        for (i, c) in cells.into_iter().enumerate() {
            match c {
                '.' => {}
                'x' | 'X' => x |= 1 << i,
                'o' | 'O' => o |= 1 << i,
                other => return Err(malformed(format!("bad cell {other:?}"))),
            }
        }
        let p = Position { x, o, to_move };
        p.validate(self).map_err(|reason| PositionError::Invalid {
            text: text.to_string(),
            reason,
        })?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn board() -> BoardSpec {
        BoardSpec::new(3, 4).unwrap()
    }

    const LOOP: &str = "..ooxxx.o:x";
    const RACE: &str = "..o.xoxox:x";

    #[test]
    fn initial_is_empty() {
        let b = board();
        let p = b.initial_position();
        assert_eq!(b.format_position(&p), ".........:x");
        assert_eq!((p.count(Player::X), p.count(Player::O)), (0, 0));
        assert_eq!(p.phase(&b), Phase::Placement);
        assert_eq!(p.legal_moves(&b).unwrap().len(), 9);
        assert!(p.legal_moves(&b).unwrap().iter().all(|m| matches!(m, Move::Place(_))));
    }

    #[test]
    fn loop_moves() {
        let b = board();
        let p = b.parse_position(LOOP).unwrap();
        let moves = p.legal_moves(&b).unwrap();
        // Three keep the center, three leave it.
        assert_eq!(moves.len(), 6);
        let keep: Vec<Move> = moves.into_iter().filter(|m| m.from() != Some(4)).collect();
        assert_eq!(
            keep,
            vec![
                Move::Slide { from: 5, to: 1 },
                Move::Slide { from: 5, to: 7 },
                Move::Slide { from: 6, to: 7 },
            ]
        );
    }

    #[test]
    fn race_moves() {
        let b = board();
        let p = b.parse_position(RACE).unwrap();
        let moves = p.legal_moves(&b).unwrap();
        // Brute force over the edge list: every (from, to) with an own stone
        // on one end and an empty node on the other.
        let mut brute = Vec::new();
        for &(a, c) in b.edges() {
            for (from, to) in [(a, c), (c, a)] {
                if p.cell(from) == Cell::X && p.cell(to) == Cell::Empty {
                    brute.push(Move::Slide { from, to });
                }
            }
        }
        brute.sort();
        assert_eq!(moves, brute);
        assert_eq!(moves.len(), 4);
    }

    #[test]
    fn apply_examples() {
        let b = board();
        let p = b.initial_position().apply_move(&b, Move::Place(4)).unwrap();
        assert_eq!(b.format_position(&p), "....x....:o");
        let p = p.apply_move(&b, Move::Place(2)).unwrap();
        assert_eq!(b.format_position(&p), "..o.x....:x");
        let lp = b.parse_position(LOOP).unwrap();
        let q = lp.apply_move(&b, Move::Slide { from: 5, to: 1 }).unwrap();
        assert_eq!(b.format_position(&q), ".xoox.x.o:o");
    }

    #[test]
    fn illegal_moves_rejected() {
        let b = board();
        let p = b.parse_position(LOOP).unwrap();
        for mv in [
            Move::Place(0),
            Move::Slide { from: 6, to: 0 },
            Move::Slide { from: 2, to: 1 },
            Move::Slide { from: 5, to: 2 },
            Move::Slide { from: 12, to: 1 },
        ] {
            assert!(matches!(p.apply_move(&b, mv), Err(PositionError::IllegalMove { .. })), "{mv}");
        }
        let q = b.initial_position();
        assert!(q.apply_move(&b, Move::Slide { from: 0, to: 1 }).is_err());
    }

    #[test]
    fn winners() {
        let b = board();
        assert_eq!(b.initial_position().winner(&b).unwrap(), None);
        let p = b.parse_position("xxxoo....:o").unwrap();
        assert_eq!(p.winner(&b).unwrap(), Some(Player::X));
        assert!(matches!(p.legal_moves(&b), Err(PositionError::Terminal(Player::X))));
        for double in [".ox.ox.ox", "o.xo.xo.x", ".xo.xo.xo"] {
            let raw = Position::from_masks(
                mask_of(double, 'x'),
                mask_of(double, 'o'),
                Player::X,
            );
            assert_eq!(raw.winner(&b), Err(PositionError::DoubleWin));
            assert!(b.parse_position(&format!("{double}:x")).is_err());
        }
    }

    fn mask_of(cells: &str, c: char) -> u32 {
        cells.chars().enumerate().filter(|&(_, d)| d == c).fold(0, |m, (i, _)| m | 1 << i)
    }

    #[test]
    fn notation_errors() {
        let b = board();
        assert!(matches!(b.parse_position("xxxx.....:o"), Err(PositionError::Invalid { .. })));
        assert!(matches!(b.parse_position("........:x"), Err(PositionError::Malformed { .. })));
        assert!(matches!(b.parse_position(".........x"), Err(PositionError::Malformed { .. })));
        assert!(matches!(b.parse_position(".........:z"), Err(PositionError::Malformed { .. })));
        assert!(matches!(b.parse_position("........q:x"), Err(PositionError::Malformed { .. })));
        // Placement turn order.
        assert!(b.parse_position("x........:x").is_err());
        assert!(b.parse_position("o........:o").is_err());
        assert!(b.parse_position(LOOP).is_ok());
        assert!(b.parse_position("..ooxxx.o:o").is_ok());
    }

    #[test]
    fn loop_and_game_a_share_a_representative() {
        let b = board();
        let lp = b.parse_position(LOOP).unwrap();
        let game_a = b.parse_position("oxo.x..ox:x").unwrap();
        assert_eq!(b.canonical(&lp), b.canonical(&game_a));
        let empty = b.initial_position();
        assert_eq!(b.canonical(&empty), empty);
    }

    #[test]
    fn pack_roundtrip() {
        let b = BoardSpec::new(3, 15).unwrap();
        let p = Position::from_masks(1 << 30 | 1, 1 << 29 | 2, Player::O);
        assert_eq!(Position::unpack(p.pack()), p);
        let _ = b;
    }
}
