//! The generalized Picaria board.
//!
//! A board with `s` sides has `2s + 1` nodes: `s` corners on an outer
//! polygon, one midpoint on each outer side, and a center. Slides run along
//! the outer sides (corner to midpoint), around the inner polygon formed by
//! the midpoints, and along the spokes from the center to every other node.
//!
//! Nodes are numbered corner₀, midpoint₀, corner₁, midpoint₁, … with the
//! center last, where midpointᵢ sits between cornerᵢ and cornerᵢ₊₁. The
//! square board (`s = 4`) is the exception: its nodes are renumbered in
//! row-major order of the 3×3 grid so that positions print like a
//! Tic-tac-toe board:
//!
//! ```text
//!   0 1 2
//!   3 4 5
//!   6 7 8
//! ```

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Node index into a [`BoardSpec`].
pub type Node = u8;

/// Largest supported number of sides; positions pack each color into 31 bits.
pub const MAX_SIDES: u8 = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("unsupported game (k={k}, s={s}): {reason}")]
    Parameters { k: u8, s: u8, reason: String },
    #[error("grid coordinates only exist on the square board (s=4), not s={0}")]
    NotSquare(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRole {
    Corner,
    Midpoint,
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeInfo {
    pub role: NodeRole,
    /// Position of the node around the polygon (0 for the center).
    pub index: u8,
}

/// Whether a symmetry preserves or reverses the orientation of the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetryKind {
    Rotation,
    Reflection,
}

/// One element of the dihedral group, as a permutation of node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symmetry {
    pub name: String,
    pub kind: SymmetryKind,
    /// `perm[n]` is the image of node `n`.
    pub perm: Vec<Node>,
}

impl Symmetry {
    pub fn apply_mask(&self, mask: u32) -> u32 {
        let mut out = 0;
        let mut m = mask;
        while m != 0 {
            let n = m.trailing_zeros() as usize;
            out |= 1 << self.perm[n];
            m &= m - 1;
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &n)| i == n as usize)
    }

    /// Cycle lengths of the permutation, in order of first node.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.perm.len()];
        let mut cycles = Vec::new();
        for start in 0..self.perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut n = start;
            while !seen[n] {
                seen[n] = true;
                n = self.perm[n] as usize;
                len += 1;
            }
            cycles.push(len);
        }
        cycles
    }
}

/// The (k, s) board: nodes, slide edges, win lines and symmetry group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoardSpec {
    k: u8,
    s: u8,
    nodes: Vec<NodeInfo>,
    edges: Vec<(Node, Node)>,
    neighbors: Vec<u32>,
    lines: Vec<[Node; 3]>,
    line_masks: Vec<u32>,
    symmetries: Vec<Symmetry>,
}

impl BoardSpec {
    /// Builds the board for `k` stones per player on an `s`-sided board.
    pub fn new(k: u8, s: u8) -> Result<Self, BoardError> {
        let fail = |reason: &str| {
            Err(BoardError::Parameters {
                k,
                s,
                reason: reason.to_string(),
            })
        };
        if s < 3 {
            return fail("a board needs at least 3 sides");
        }
        if s > MAX_SIDES {
            return fail("boards with more than 15 sides are not supported");
        }
        if k < 3 {
            return fail("each player needs at least 3 stones");
        }
        if 2 * k as u16 > 2 * s as u16 {
            return fail("the stones must not fill the board (2k < 2s+1)");
        }

        let n = 2 * s as usize + 1;
        let sides = s as usize;
        let corner = |i: usize| (2 * (i % sides)) as Node;
        let midpoint = |i: usize| (2 * (i % sides) + 1) as Node;
        let center = (n - 1) as Node;

        let mut nodes = Vec::with_capacity(n);
        for i in 0..sides {
            nodes.push(NodeInfo { role: NodeRole::Corner, index: i as u8 });
            nodes.push(NodeInfo { role: NodeRole::Midpoint, index: i as u8 });
        }
        nodes.push(NodeInfo { role: NodeRole::Center, index: 0 });

        let mut edges = Vec::with_capacity(5 * sides);
        for i in 0..sides {
            edges.push((corner(i), midpoint(i)));
            edges.push((midpoint(i), corner(i + 1)));
            edges.push((midpoint(i), midpoint(i + 1)));
            edges.push((corner(i), center));
            edges.push((midpoint(i), center));
        }

        let mut lines = Vec::with_capacity(2 * sides);
        for i in 0..sides {
            lines.push([corner(i), midpoint(i), corner(i + 1)]);
        }
        if sides.is_multiple_of(2) {
            let half = sides / 2;
            for i in 0..half {
                lines.push([corner(i), center, corner(i + half)]);
                lines.push([midpoint(i), center, midpoint(i + half)]);
            }
        } else {
            let across = sides.div_ceil(2);
            for i in 0..sides {
                lines.push([midpoint(i), center, corner(i + across)]);
            }
        }

        let rotation: Vec<Node> = (0..n)
            .map(|v| if v == n - 1 { center } else { ((v + 2) % (n - 1)) as Node })
            .collect();
        let reflection: Vec<Node> = (0..n)
            .map(|v| {
                if v == n - 1 {
                    center
                } else if v % 2 == 0 {
                    corner(sides - v / 2)
                } else {
                    midpoint(2 * sides - v / 2 - 1)
                }
            })
            .collect();
        let group = close_group(&[rotation, reflection], n);

        let mut spec = BoardSpec {
            k,
            s,
            nodes,
            edges,
            neighbors: Vec::new(),
            lines,
            line_masks: Vec::new(),
            symmetries: name_symmetries(group, sides),
        };
        if s == 4 {
            spec.relabel(&SQUARE_ROW_MAJOR);
        }
        spec.finish();
        Ok(spec)
    }

    /// Renames node `v` to `relabel[v]` everywhere.
    fn relabel(&mut self, relabel: &[Node]) {
        let n = self.nodes.len();
        let mut nodes = self.nodes.clone();
        for v in 0..n {
            nodes[relabel[v] as usize] = self.nodes[v];
        }
        self.nodes = nodes;
        for e in &mut self.edges {
            *e = (relabel[e.0 as usize], relabel[e.1 as usize]);
        }
        for l in &mut self.lines {
            for v in l.iter_mut() {
                *v = relabel[*v as usize];
            }
        }
        for g in &mut self.symmetries {
            let mut perm = vec![0; n];
            for v in 0..n {
                perm[relabel[v] as usize] = relabel[g.perm[v] as usize];
            }
            g.perm = perm;
        }
    }

    fn finish(&mut self) {
        for e in &mut self.edges {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        self.edges.sort_unstable();
        for l in &mut self.lines {
            l.sort_unstable();
        }
        self.lines.sort_unstable();
        self.neighbors = vec![0; self.nodes.len()];
        for &(a, b) in &self.edges {
            self.neighbors[a as usize] |= 1 << b;
            self.neighbors[b as usize] |= 1 << a;
        }
        self.line_masks = self
            .lines
            .iter()
            .map(|l| l.iter().fold(0u32, |m, &v| m | 1 << v))
            .collect();
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn s(&self) -> u8 {
        self.s
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeInfo] {
        &self.nodes
    }

    pub fn center(&self) -> Node {
        self.nodes
            .iter()
            .position(|n| n.role == NodeRole::Center)
            .expect("every board has a center") as Node
    }

    /// Slide edges as sorted `(low, high)` pairs.
    pub fn edges(&self) -> &[(Node, Node)] {
        &self.edges
    }

    /// Neighbor bitmask of node `n`.
    pub fn neighbors(&self, n: Node) -> u32 {
        self.neighbors[n as usize]
    }

    pub fn is_adjacent(&self, a: Node, b: Node) -> bool {
        (a as usize) < self.nodes.len() && self.neighbors[a as usize] & (1 << b) != 0
    }

    pub fn degree(&self, n: Node) -> u32 {
        self.neighbors[n as usize].count_ones()
    }

    /// Win lines, each sorted ascending.
    pub fn lines(&self) -> &[[Node; 3]] {
        &self.lines
    }

    pub fn line_masks(&self) -> &[u32] {
        &self.line_masks
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    /// Mask with one bit per node.
    pub fn full_mask(&self) -> u32 {
        (1u32 << self.nodes.len()) - 1
    }

    /// Whether `mask` covers at least one complete line.
    pub fn has_line(&self, mask: u32) -> bool {
        self.line_masks.iter().any(|&l| l & !mask == 0)
    }

    /// Row/column of every node on the square board, indexed by node.
    pub fn grid_mapping(&self) -> Result<Vec<(u8, u8)>, BoardError> {
        if self.s != 4 {
            return Err(BoardError::NotSquare(self.s));
        }
        Ok((0..9).map(|v| (v / 3, v % 3)).collect())
    }

    /// Node at a square-board grid coordinate.
    pub fn grid_node(&self, row: u8, col: u8) -> Result<Node, BoardError> {
        if self.s != 4 {
            return Err(BoardError::NotSquare(self.s));
        }
        assert!(row < 3 && col < 3, "grid coordinate out of range");
        Ok(row * 3 + col)
    }
}

impl fmt::Display for BoardSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{}) board: {} nodes, {} edges, {} lines, {} symmetries",
            self.k,
            self.s,
            self.nodes.len(),
            self.edges.len(),
            self.lines.len(),
            self.symmetries.len()
        )
    }
}

/// Polygon numbering of the square board mapped onto row-major grid cells:
/// corners (0,0) (0,2) (2,2) (2,0) clockwise, midpoints between them.
const SQUARE_ROW_MAJOR: [Node; 9] = [0, 1, 2, 5, 8, 7, 6, 3, 4];

fn compose(outer: &[Node], inner: &[Node]) -> Vec<Node> {
    inner.iter().map(|&v| outer[v as usize]).collect()
}

fn close_group(generators: &[Vec<Node>], n: usize) -> Vec<Vec<Node>> {
    let identity: Vec<Node> = (0..n as Node).collect();
    let mut seen = BTreeSet::new();
    seen.insert(identity.clone());
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for h in generators {
            let gh = compose(h, &g);
            if seen.insert(gh.clone()) {
                queue.push_back(gh);
            }
        }
    }
    seen.into_iter().collect()
}

/// Classifies each polygon-numbered group element by where corner₀ goes and
/// whether orientation is kept, and sorts rotations before reflections.
fn name_symmetries(group: Vec<Vec<Node>>, sides: usize) -> Vec<Symmetry> {
    let mut tagged: Vec<(SymmetryKind, usize, Vec<Node>)> = group
        .into_iter()
        .map(|perm| {
            let shift = perm[0] as usize / 2;
            let kind = if perm[1] as usize == 2 * shift + 1 {
                SymmetryKind::Rotation
            } else {
                SymmetryKind::Reflection
            };
            (kind, shift, perm)
        })
        .collect();
    tagged.sort();
    tagged
        .into_iter()
        .map(|(kind, shift, perm)| {
            let name = match (sides, kind, shift) {
                (_, SymmetryKind::Rotation, 0) => "e".to_string(),
                (4, SymmetryKind::Rotation, j) => format!("R{}", 90 * j),
                (4, SymmetryKind::Reflection, 0) => "D1".to_string(),
                (4, SymmetryKind::Reflection, 1) => "V".to_string(),
                (4, SymmetryKind::Reflection, 2) => "D2".to_string(),
                (4, SymmetryKind::Reflection, _) => "H".to_string(),
                (_, SymmetryKind::Rotation, j) => format!("rot{j}"),
                (_, SymmetryKind::Reflection, j) => format!("ref{j}"),
            };
            Symmetry { name, kind, perm }
        })
        .collect()
}
