//! Match aggregation with Agresti–Coull intervals.

use std::fmt;

use thiserror::Error;

use crate::game::Player;
use crate::scalar::{count, lit, Scalar};
use crate::search::MatchRecord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("no games to summarize")]
    EmptySample,
    #[error("invalid sample: {0}")]
    InvalidSample(String),
}

/// z for a two-sided 95% interval.
pub const Z95: f64 = 1.96;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AgentId {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchSummary<T> {
    pub wins: u32,
    pub games: u32,
    /// Raw `wins / games`.
    pub winrate: T,
    /// Adjusted center `p~`.
    pub center: T,
    /// Half-width before clipping.
    pub half_width: T,
    pub ci_low: T,
    pub ci_high: T,
    pub z: T,
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn agresti_coull<T: Scalar>(wins: u32, games: u32, z: T) -> Result<MatchSummary<T>, StatsError> {
    if games == 0 {
        return Err(StatsError::EmptySample);
    }
    if wins > games {
        return Err(StatsError::InvalidSample(format!("{wins} wins out of {games} games")));
    }
    if !(z > T::zero()) || !z.is_finite() {
        return Err(StatsError::InvalidSample(format!("z must be positive, got {z:?}")));
    }
    let z2 = z * z;
    let n_adj = count::<T>(games) + z2;
    let p_adj = (count::<T>(wins) + z2 / lit(2.0)) / n_adj;
    let half = z * (p_adj * (T::one() - p_adj) / n_adj).sqrt();
    Ok(MatchSummary {
        wins,
        games,
        winrate: count::<T>(wins) / count(games),
        center: p_adj,
        half_width: half,
        ci_low: (p_adj - half).max(T::zero()),
        ci_high: (p_adj + half).min(T::one()),
        z,
    })
}

/// Wins of `perspective` over all records, whatever colour it played.
pub fn summarize<T: Scalar>(records: &[MatchRecord], perspective: AgentId) -> Result<MatchSummary<T>, StatsError> {
    summarize_with(records, perspective, lit(Z95))
}

pub fn summarize_with<T: Scalar>(
    records: &[MatchRecord],
    perspective: AgentId,
    z: T,
) -> Result<MatchSummary<T>, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let wins = records
        .iter()
        .filter(|r| match perspective {
            AgentId::A => r.a_won(),
            AgentId::B => r.b_won(),
        })
        .count();
    agresti_coull(wins as u32, records.len() as u32, z)
}

/// Games A played as Black and as White.
pub fn color_counts(records: &[MatchRecord]) -> (usize, usize) {
    let black = records.iter().filter(|r| r.a_color == Player::Black).count();
    (black, records.len() - black)
}

impl<T: Scalar> fmt::Display for MatchSummary<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |x: T| x.to_f64().unwrap_or(f64::NAN) * 100.0;
        write!(
            f,
            "{:>6} {:>6} {:>8.1}% {:>8.1}% {:>8.1}% {:>6.1}%",
            self.wins,
            self.games,
            pct(self.winrate),
            pct(self.ci_low),
            pct(self.ci_high),
            pct(self.half_width)
        )
    }
}

impl<T> MatchSummary<T> {
    pub const TABLE_HEADER: &'static str = "  wins  games  winrate   ci_low  ci_high  ±half";
}
