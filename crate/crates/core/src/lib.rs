//! Exact solving of Picaria and its relatives.
//!
//! Picaria is a three-in-a-row game on a 3×3 board: each player places three
//! stones and then slides them along the board's edges. The same rules work
//! on any board with `s` sides and `k` stones per player. This crate builds
//! those boards ([`board`]), plays them ([`position`]), solves them exactly
//! ([`solver`]), counts their positions up to symmetry ([`counting`]),
//! replays recorded proof lines against the solution ([`verify`]) and serves
//! perfect play over HTTP ([`api`]).
//!
//! ```
//! use picaria::{board::BoardSpec, solver};
//!
//! let board = BoardSpec::new(3, 4).unwrap();
//! let table = solver::solve(&board);
//! let root = table.value(&board, &board.initial_position()).unwrap();
//! assert_eq!(root, solver::GameValue::Draw);
//! ```

pub mod api;
pub mod board;
pub mod cli;
pub mod counting;
pub mod position;
pub mod solver;
pub mod verify;

pub use board::{BoardError, BoardSpec, Node};
pub use position::{Move, Phase, Player, Position, PositionError};
pub use solver::{best_moves, solve, GameValue, SolveTable};
