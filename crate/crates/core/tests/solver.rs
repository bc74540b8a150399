use picaria::board::BoardSpec;
use picaria::counting::sliding_positions;
use picaria::position::{Phase, Player};
use picaria::solver::{
    check_local_consistency, oracle_solve, reachable_positions, reachable_states, solve,
    GameValue,
};

fn board(k: u8, s: u8) -> BoardSpec {
    BoardSpec::new(k, s).unwrap()
}

#[test]
fn retrograde_matches_oracle() {
    for (k, s) in [(3, 3), (3, 4), (3, 5), (4, 4)] {
        let b = board(k, s);
        let fast = solve(&b);
        let slow = oracle_solve(&b);
        assert_eq!(fast.len(), slow.len(), "({k},{s}) sizes");
        for (p, v) in fast.iter() {
            assert_eq!(slow.get_canonical(&p), Some(v), "({k},{s}) {}", b.format_position(&p));
        }
    }
}

#[test]
fn picaria_table_is_locally_consistent() {
    let b = board(3, 4);
    let t = solve(&b);
    for (p, _) in t.iter() {
        check_local_consistency(&b, &t, &p).unwrap();
    }
}

#[test]
fn picaria_values_are_symmetric() {
    let b = board(3, 4);
    let t = solve(&b);
    for (p, v) in t.iter() {
        let base: Vec<_> = {
            let mut kids: Vec<GameValue> = match p.legal_moves(&b) {
                Ok(ms) => ms.iter().map(|&m| t.value(&b, &p.apply_move(&b, m).unwrap()).unwrap()).collect(),
                Err(_) => Vec::new(),
            };
            kids.sort_by_key(|v| (v.tag(), v.depth()));
            kids
        };
        for g in b.symmetries() {
            let q = p.transform(g);
            assert_eq!(t.value(&b, &q).unwrap(), v);
            let mut kids: Vec<GameValue> = match q.legal_moves(&b) {
                Ok(ms) => ms.iter().map(|&m| t.value(&b, &q.apply_move(&b, m).unwrap()).unwrap()).collect(),
                Err(_) => Vec::new(),
            };
            kids.sort_by_key(|v| (v.tag(), v.depth()));
            assert_eq!(kids, base, "{} under {}", b.format_position(&p), g.name);
        }
    }
}

#[test]
fn depth_parity_holds_everywhere() {
    for (k, s) in [(3, 3), (3, 4), (3, 5)] {
        let t = solve(&board(k, s));
        for (_, v) in t.iter() {
            match v {
                GameValue::Win(d) => assert_eq!(d % 2, 1),
                GameValue::Loss(d) => assert_eq!(d % 2, 0),
                GameValue::Draw => {}
            }
        }
    }
}

#[test]
fn nobody_is_ever_blocked_in_picaria() {
    let b = board(3, 4);
    let t = solve(&b);
    for (p, v) in t.iter() {
        if p.winner(&b).unwrap().is_none() {
            assert!(!p.legal_moves(&b).unwrap().is_empty(), "{}", b.format_position(&p));
            assert_ne!(v, GameValue::Loss(0));
        }
    }
    for p in sliding_positions(&b) {
        if p.winner(&b).unwrap().is_none() {
            assert!(!p.legal_moves(&b).unwrap().is_empty(), "{}", b.format_position(&p));
        }
    }
}

#[test]
fn picaria_state_space() {
    let b = board(3, 4);
    let all = sliding_positions(&b);
    assert_eq!(all.len(), 450);
    assert!(all.iter().all(|p| p.phase(&b) == Phase::Sliding));
    assert_eq!(all.iter().filter(|p| p.to_move() == Player::X).count(), 225);

    // Full boards are exactly two disjoint lines when both players win.
    let lines = b.line_masks();
    let double_wins = lines
        .iter()
        .flat_map(|&a| lines.iter().map(move |&c| (a, c)))
        .filter(|(a, c)| a & c == 0)
        .count();
    assert_eq!(double_wins, 12);

    let stats = reachable_states(&b);
    let reach = reachable_positions(&b);
    assert_eq!(reach.len(), stats.canonical_total());
    assert!(reach.iter().all(|p| p.winner(&b).is_ok()));
    let sliding: Vec<_> = reach.iter().filter(|p| p.phase(&b) == Phase::Sliding).collect();
    assert!(sliding.iter().all(|p| all.contains(p)));
    assert_eq!(stats.raw_sliding_boards, 1680 - double_wins);

    // A line is always completed by the player who just moved, so play
    // reaches exactly the positions where the side to move holds no line.
    let mut expected: Vec<_> = all
        .iter()
        .filter(|p| p.winner(&b).unwrap() != Some(p.to_move()))
        .map(|p| p.pack())
        .collect();
    let mut got: Vec<_> = sliding.iter().map(|p| p.pack()).collect();
    expected.sort_unstable();
    got.sort_unstable();
    assert_eq!(got, expected);
}
