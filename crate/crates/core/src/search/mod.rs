//! Memory-bounded search drivers.

mod engine;
mod params;
mod selfplay;

use std::fmt;

use thiserror::Error;

use crate::game::{Game, GameError};
use crate::playout::MastTable;
use crate::pool::PoolError;
use crate::scalar::Scalar;

pub use params::{Budget, SearchParams, Variant};
pub use selfplay::{play_game, turn_seed, MatchRecord};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("search started from a terminal position")]
    TerminalState,
    #[error(transparent)]
    Pool(#[from] PoolError),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootMove<T> {
    pub mv: usize,
    pub visits: u32,
    pub mean: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult<T> {
    pub chosen_move: usize,
    pub root_visits: u32,
    pub total_playouts: u64,
    /// Peak live nodes, roots excluded.
    pub peak_nodes: u32,
    pub recycled_total: u64,
    pub expansions: u64,
    /// Root children by decreasing visits.
    pub root_moves: Vec<RootMove<T>>,
}

impl<T: Scalar> fmt::Display for SearchResult<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "move={} playouts={} root_visits={} peak_nodes={} recycled={}",
            self.chosen_move, self.total_playouts, self.root_visits, self.peak_nodes, self.recycled_total
        )
    }
}

/// Runs one search from `state` and returns the most-visited root move.
///
/// `mast` is read by every playout and updated after it; it is the caller's
/// to keep, decay or clear between searches.
pub fn run_search<G: Game, T: Scalar>(
    state: &G,
    params: &SearchParams<T>,
    mast: &mut MastTable<T>,
) -> Result<SearchResult<T>, SearchError> {
    params.validate()?;
    if state.is_terminal() {
        return Err(SearchError::TerminalState);
    }
    if mast.move_count() != G::MOVE_COUNT {
        return Err(SearchError::InvalidParams(format!(
            "MAST table has {} moves, game has {}",
            mast.move_count(),
            G::MOVE_COUNT
        )));
    }
    let engine = engine::Engine::<G, T>::new(params, mast);
    let mut done = if params.variant.is_two_level() {
        engine.run_two_level(state)?
    } else {
        engine.run_single(state)?
    };

    let pool = &done.top;
    let mut root_moves: Vec<RootMove<T>> = pool
        .children(done.root)
        .filter_map(|c| {
            let n = pool.node(c);
            n.move_id().map(|mv| RootMove {
                mv,
                visits: n.visits(),
                mean: engine::mean_of(n.reward_sum(), n.visits()),
            })
        })
        .collect();
    root_moves.sort_by(|a, b| b.visits.cmp(&a.visits).then(a.mv.cmp(&b.mv)));

    let chosen_move = match engine::robust_child(pool, done.root, &mut done.rng) {
        Some(m) => m,
        None => {
            let mut c = Vec::new();
            state.candidate_moves(&mut c);
            c.into_iter()
                .find(|&m| state.is_legal(m))
                .ok_or(SearchError::TerminalState)?
        }
    };

    Ok(SearchResult {
        chosen_move,
        root_visits: pool.node(done.root).visits(),
        total_playouts: done.playouts,
        peak_nodes: done.peak_nodes,
        recycled_total: done.recycled,
        expansions: done.expansions,
        root_moves,
    })
}

/// `run_search` with a fresh MAST table.
pub fn search<G: Game, T: Scalar>(state: &G, params: &SearchParams<T>) -> Result<SearchResult<T>, SearchError> {
    let mut mast = MastTable::for_game::<G>();
    run_search(state, params, &mut mast)
}
