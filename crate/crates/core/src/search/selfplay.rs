use std::time::Instant;

use crate::game::{Game, Player};
use crate::playout::MastTable;
use crate::scalar::Scalar;

use super::{run_search, SearchError, SearchParams};

/// One finished game between agents A and B.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchRecord {
    pub game_id: u64,
    pub seed: u64,
    pub agent_a: String,
    pub agent_b: String,
    pub a_color: Player,
    /// `None` is a draw.
    pub winner: Option<Player>,
    pub moves: u32,
    pub playouts_a: u64,
    pub playouts_b: u64,
    pub peak_nodes_a: u32,
    pub peak_nodes_b: u32,
    pub recycled_a: u64,
    pub recycled_b: u64,
    pub wall_ms: u64,
    pub transcript: Vec<usize>,
}

impl MatchRecord {
    pub fn a_won(&self) -> bool {
        self.winner == Some(self.a_color)
    }

    pub fn b_won(&self) -> bool {
        self.winner == Some(self.a_color.opponent())
    }
}

/// Seed of the search made at `ply` of a game seeded with `game_seed`.
pub fn turn_seed(game_seed: u64, ply: u32) -> u64 {
    splitmix(game_seed ^ splitmix(u64::from(ply).wrapping_add(0x5851_F42D_4C95_7F2D)))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Side<'a, T> {
    params: &'a SearchParams<T>,
    mast: MastTable<T>,
    turns: u32,
    playouts: u64,
    peak: u32,
    recycled: u64,
}

/// Plays one game from `initial`, A taking `a_color`. Each agent keeps its
/// MAST table for the whole game and decays it before each of its turns
/// after the first. The search seed of every turn derives from `seed` and
/// the ply, so a game is a pure function of its inputs.
pub fn play_game<G: Game, T: Scalar>(
    initial: &G,
    agent_a: &SearchParams<T>,
    agent_b: &SearchParams<T>,
    a_color: Player,
    seed: u64,
) -> Result<MatchRecord, SearchError> {
    agent_a.validate()?;
    agent_b.validate()?;
    let started = Instant::now();
    let side = |params| Side {
        params,
        mast: MastTable::for_game::<G>(),
        turns: 0,
        playouts: 0,
        peak: 0,
        recycled: 0,
    };
    let mut sides = [side(agent_a), side(agent_b)];
    let mut state = initial.clone();
    let mut transcript = Vec::new();
    while !state.is_terminal() {
        let s = &mut sides[usize::from(state.to_move() != a_color)];
        if s.turns > 0 {
            s.mast.decay(s.params.mast_decay);
        }
        s.turns += 1;
        let params = s.params.with_seed(turn_seed(seed, state.ply()));
        let result = run_search(&state, &params, &mut s.mast)?;
        s.playouts += result.total_playouts;
        s.peak = s.peak.max(result.peak_nodes);
        s.recycled += result.recycled_total;
        state.play(result.chosen_move)?;
        transcript.push(result.chosen_move);
    }
    let [a, b] = sides;
    Ok(MatchRecord {
        game_id: 0,
        seed,
        agent_a: String::new(),
        agent_b: String::new(),
        a_color,
        winner: state.winner(),
        moves: state.ply(),
        playouts_a: a.playouts,
        playouts_b: b.playouts,
        peak_nodes_a: a.peak,
        peak_nodes_b: b.peak,
        recycled_a: a.recycled,
        recycled_b: b.recycled,
        wall_ms: started.elapsed().as_millis() as u64,
        transcript,
    })
}
