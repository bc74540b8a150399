//! Orbit counting for boards with a fixed number of stones per color.
//!
//! Burnside's lemma gives the number of orbits of the symmetry group `G`
//! acting on the set of boards as the average number of boards fixed by a
//! group element. A board is fixed by `g` exactly when every cycle of `g`
//! is colored uniformly, so `|Fix(g)|` only depends on the cycle lengths.
//! [`enumerate_orbits`] counts the same orbits by brute force.

use std::fmt;

use rustc_hash::FxHashSet;
use serde::Serialize;
use thiserror::Error;

use crate::board::{BoardSpec, Symmetry};
use crate::position::{Player, Position};

/// Largest number of boards [`enumerate_orbits`] will visit.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingError {
    #[error("profile ({x} x, {o} o) does not fit on {nodes} nodes")]
    Profile { x: u32, o: u32, nodes: usize },
    #[error("{boards} boards exceed the enumeration limit of {ENUMERATION_LIMIT}")]
    TooLarge { boards: u128 },
}

/// Number of stones of each color on a board; the rest of the nodes are
/// empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub x: u32,
    pub o: u32,
}

impl Profile {
    /// All stones on the board: the sliding phase.
    pub fn full(spec: &BoardSpec) -> Self {
        Profile { x: spec.k() as u32, o: spec.k() as u32 }
    }

    fn check(&self, spec: &BoardSpec) -> Result<(), CountingError> {
        if (self.x + self.o) as usize > spec.node_count() {
            return Err(CountingError::Profile { x: self.x, o: self.o, nodes: spec.node_count() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixCount {
    pub element: String,
    pub fixed: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub k: u8,
    pub s: u8,
    pub profile: Profile,
    pub group_order: usize,
    pub fix_counts: Vec<FixCount>,
    /// Burnside orbit count before removing impossible boards.
    pub orbit_count_raw: u128,
    /// Orbits of boards where both players hold a line.
    pub excluded_orbits: u128,
    pub orbit_count: u128,
    /// Orbits times two, one per side to move.
    pub position_graph_size: u128,
    /// Brute-force orbit count, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumerated_orbits: Option<u128>,
}

impl OrbitReport {
    pub fn fix_sum(&self) -> u128 {
        self.fix_counts.iter().map(|f| f.fixed).sum()
    }
}

impl fmt::Display for OrbitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "board (k={}, s={}), profile {} x / {} o, |G| = {}",
            self.k, self.s, self.profile.x, self.profile.o, self.group_order
        )?;
        for fc in &self.fix_counts {
            writeln!(f, "  |Fix({:>4})| = {:>12}", fc.element, fc.fixed)?;
        }
        writeln!(f, "  {:<22}{:>12}", "sum", self.fix_sum())?;
        writeln!(f, "  {:<22}{:>12}", "orbits (Burnside)", self.orbit_count_raw)?;
        if let Some(e) = self.enumerated_orbits {
            writeln!(f, "  {:<22}{:>12}", "orbits (enumerated)", e)?;
        }
        writeln!(f, "  {:<22}{:>12}", "double-win orbits", self.excluded_orbits)?;
        writeln!(f, "  {:<22}{:>12}", "orbits", self.orbit_count)?;
        write!(f, "  {:<22}{:>12}", "position graph size", self.position_graph_size)
    }
}

/// Multinomial coefficient `n! / (a! b! (n-a-b)!)`.
pub fn multinomial(n: u32, a: u32, b: u32) -> u128 {
    binomial(n, a) * binomial(n - a, b)
}

fn binomial(n: u32, r: u32) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r) as u128;
    (0..r).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Number of boards with the given profile left unchanged by `g`.
pub fn fixed_boards(g: &Symmetry, profile: Profile) -> u128 {
    let (tx, to) = (profile.x as usize, profile.o as usize);
    // ways[a][b]: colorings of the cycles seen so far with a X and b O nodes.
    let mut ways = vec![vec![0u128; to + 1]; tx + 1];
    ways[0][0] = 1;
    for len in g.cycle_lengths() {
        let mut next = ways.clone();
        for a in 0..=tx {
            for b in 0..=to {
                let w = ways[a][b];
                if w == 0 {
                    continue;
                }
                if a + len <= tx {
                    next[a + len][b] += w;
                }
                if b + len <= to {
                    next[a][b + len] += w;
                }
            }
        }
        ways = next;
    }
    ways[tx][to]
}

/// Burnside orbit count for boards with the given profile, with orbits of
/// double-win boards reported and removed.
pub fn burnside_orbits(spec: &BoardSpec, profile: Profile) -> Result<OrbitReport, CountingError> {
    profile.check(spec)?;
    let fix_counts: Vec<FixCount> = spec
        .symmetries()
        .iter()
        .map(|g| FixCount { element: g.name.clone(), fixed: fixed_boards(g, profile) })
        .collect();
    let order = spec.symmetries().len();
    let sum: u128 = fix_counts.iter().map(|f| f.fixed).sum();
    assert_eq!(sum % order as u128, 0, "Burnside sum must divide by the group order");
    let raw = sum / order as u128;
    let excluded = double_win_orbits(spec, profile).len() as u128;
    Ok(OrbitReport {
        k: spec.k(),
        s: spec.s(),
        profile,
        group_order: order,
        fix_counts,
        orbit_count_raw: raw,
        excluded_orbits: excluded,
        orbit_count: raw - excluded,
        position_graph_size: 2 * (raw - excluded),
        enumerated_orbits: None,
    })
}

/// Canonical representatives of the double-win boards with the given
/// profile, sorted. Positions carry X as mover; the flag is irrelevant here.
pub fn double_win_orbits(spec: &BoardSpec, profile: Profile) -> Vec<Position> {
    let masks = spec.line_masks();
    let free_all = spec.full_mask();
    let mut boards = FxHashSet::default();
    for &lx in masks {
        for &lo in masks {
            if lx & lo != 0 || profile.x < 3 || profile.o < 3 {
                continue;
            }
            let free = free_all & !lx & !lo;
            for_each_subset(free, profile.x - 3, |ex| {
                for_each_subset(free & !ex, profile.o - 3, |eo| {
                    let p = Position::from_masks(lx | ex, lo | eo, Player::X);
                    boards.insert(spec.canonical(&p).pack());
                });
            });
        }
    }
    let mut reps: Vec<u64> = boards.into_iter().collect();
    reps.sort_unstable();
    reps.into_iter().map(Position::unpack).collect()
}

/// Double-win orbits of the sliding phase (`k` stones each).
pub fn count_double_win_orbits(spec: &BoardSpec) -> (usize, Vec<Position>) {
    let reps = double_win_orbits(spec, Profile::full(spec));
    (reps.len(), reps)
}

/// Counts orbits by canonicalizing every board with the profile.
pub fn enumerate_orbits(spec: &BoardSpec, profile: Profile) -> Result<u128, CountingError> {
    profile.check(spec)?;
    let boards = multinomial(spec.node_count() as u32, profile.x, profile.o);
    if boards > ENUMERATION_LIMIT {
        return Err(CountingError::TooLarge { boards });
    }
    let full = spec.full_mask();
    let mut reps = FxHashSet::default();
    for_each_subset(full, profile.x, |xm| {
        for_each_subset(full & !xm, profile.o, |om| {
            reps.insert(spec.canonical(&Position::from_masks(xm, om, Player::X)).pack());
        });
    });
    Ok(reps.len() as u128)
}

/// Every full sliding-phase position (both movers) except double wins,
/// reduced by symmetry.
pub fn sliding_positions(spec: &BoardSpec) -> Vec<Position> {
    let profile = Profile::full(spec);
    let full = spec.full_mask();
    let mut reps = FxHashSet::default();
    for_each_subset(full, profile.x, |xm| {
        for_each_subset(full & !xm, profile.o, |om| {
            if spec.has_line(xm) && spec.has_line(om) {
                return;
            }
            for mover in [Player::X, Player::O] {
                reps.insert(spec.canonical(&Position::from_masks(xm, om, mover)).pack());
            }
        });
    });
    let mut v: Vec<u64> = reps.into_iter().collect();
    v.sort_unstable();
    v.into_iter().map(Position::unpack).collect()
}

/// Calls `f` with every `size`-element subset of `set`.
fn for_each_subset(set: u32, size: u32, mut f: impl FnMut(u32)) {
    fn go(rest: u32, size: u32, acc: u32, f: &mut dyn FnMut(u32)) {
        if size == 0 {
            f(acc);
            return;
        }
        if rest.count_ones() < size {
            return;
        }
        let low = rest & rest.wrapping_neg();
        go(rest & !low, size - 1, acc | low, f);
        go(rest & !low, size, acc, f);
    }
    go(set, size, 0, &mut f);
}
