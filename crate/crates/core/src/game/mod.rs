//! Two-player game interface and the Go 9x9 implementation.

pub mod go;

use std::fmt;

use thiserror::Error;

pub use go::{GameOutcome, GoState, Move, Point};

/// One of the two players.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Black,
    White,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Black, Player::White];

    #[inline]
    pub fn opponent(self) -> Player {
        match self {
            Player::Black => Player::White,
            Player::White => Player::Black,
        }
    }

    /// Dense index: Black = 0, White = 1.
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Player::Black => "black",
            Player::White => "white",
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Player {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "b" | "black" => Ok(Player::Black),
            "w" | "white" => Ok(Player::White),
            _ => Err(GameError::Parse(format!("unknown color {s:?}"))),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("illegal move {0}")]
    IllegalMove(String),
    #[error("position is not terminal")]
    NotTerminal,
    #[error("parse error: {0}")]
    Parse(String),
}

/// The game surface the search engine needs.
///
/// Moves are addressed by a dense id in `0..MOVE_COUNT`, which is also the
/// index into AMAF and MAST tables.
pub trait Game: Clone + Send + Sync {
    /// Size of the dense move-id space.
    const MOVE_COUNT: usize;

    fn to_move(&self) -> Player;

    fn ply(&self) -> u32;

    fn is_terminal(&self) -> bool;

    /// Appends a superset of the legal move ids to `out`. Used to score moves
    /// lazily; legality of the winner is confirmed with [`Game::is_legal`].
    fn candidate_moves(&self, out: &mut Vec<usize>);

    fn is_legal(&self, mv: usize) -> bool;

    /// Plays a move id. Fails with `IllegalMove` when the move is not legal.
    fn play(&mut self, mv: usize) -> Result<(), GameError>;

    /// Appends candidate playout moves; [`Game::is_playout_move`] filters them.
    fn playout_candidates(&self, out: &mut Vec<usize>);

    /// Legal and acceptable to a playout policy.
    fn is_playout_move(&self, mv: usize) -> bool;

    /// Move played by a playout when no candidate qualifies.
    fn fallback_playout_move(&self) -> usize;

    /// Winner of the current position scored as final; `None` is a draw.
    fn winner(&self) -> Option<Player>;
}
