//! Independent reference solver.
//!
//! Works on raw positions (no symmetry reduction) and computes values by
//! repeated full sweeps: after sweep `n`, every position whose outcome is
//! forced within `n` plies carries its final label. The sweeps stop when one
//! of them changes nothing. Only at the very end are keys folded into
//! canonical form, so a symmetry bug in the main solver shows up as a
//! mismatch here.

use rustc_hash::FxHashMap;

use super::{GameValue, SolveTable};
use crate::board::BoardSpec;
use crate::position::Position;

pub(crate) struct RawGraph {
    pub states: Vec<Position>,
    pub child_start: Vec<u32>,
    pub children: Vec<u32>,
}

impl RawGraph {
    pub fn build(spec: &BoardSpec) -> Self {
        let root = spec.initial_position();
        let mut states = vec![root];
        let mut index: FxHashMap<u64, u32> = FxHashMap::default();
        index.insert(root.pack(), 0);
        let mut child_start = vec![0u32];
        let mut children = Vec::new();
        let mut next = 0;
        while next < states.len() {
            let p = states[next];
            if p.winner(spec).expect("play never reaches a double win").is_none() {
                let mut kids: Vec<u32> = p
                    .moves_unchecked(spec)
                    .into_iter()
                    .map(|m| {
                        let c = p.apply_unchecked(m);
                        *index.entry(c.pack()).or_insert_with(|| {
                            states.push(c);
                            (states.len() - 1) as u32
                        })
                    })
                    .collect();
                kids.sort_unstable();
                kids.dedup();
                children.extend(kids);
            }
            child_start.push(children.len() as u32);
            next += 1;
        }
        RawGraph { states, child_start, children }
    }

    fn children_of(&self, i: usize) -> &[u32] {
        &self.children[self.child_start[i] as usize..self.child_start[i + 1] as usize]
    }
}

/// Solves the raw game graph by bounded-horizon sweeps and returns the
/// result keyed by canonical position.
///
/// Panics if two raw positions in one symmetry orbit end up with different
/// values, which would mean the rules themselves are not symmetric.
pub fn oracle_solve(spec: &BoardSpec) -> SolveTable {
    let graph = RawGraph::build(spec);
    let n = graph.states.len();
    let mut value: Vec<Option<GameValue>> = (0..n)
        .map(|i| graph.children_of(i).is_empty().then_some(GameValue::Loss(0)))
        .collect();

    let mut horizon = 0u32;
    loop {
        horizon += 1;
        let previous = value.clone();
        let mut changed = false;
        for (i, slot) in value.iter_mut().enumerate() {
            if slot.is_some() {
                continue;
            }
            let kids = graph.children_of(i);
            let any_lost = kids
                .iter()
                .any(|&c| matches!(previous[c as usize], Some(GameValue::Loss(_))));
            let all_won = kids
                .iter()
                .all(|&c| matches!(previous[c as usize], Some(GameValue::Win(_))));
            if any_lost {
                *slot = Some(GameValue::Win(horizon));
                changed = true;
            } else if all_won {
                *slot = Some(GameValue::Loss(horizon));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut entries: FxHashMap<u64, GameValue> = FxHashMap::default();
    for (p, v) in graph.states.iter().zip(value) {
        let v = v.unwrap_or(GameValue::Draw);
        let key = spec.canonical(p).pack();
        if let Some(prev) = entries.insert(key, v) {
            assert_eq!(
                prev,
                v,
                "symmetric positions disagree at {}",
                spec.format_position(p)
            );
        }
    }
    SolveTable::from_entries(spec.k(), spec.s(), entries)
}
