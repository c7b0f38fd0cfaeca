//! MAST-guided epsilon-greedy playouts.

use rand::Rng;

use crate::game::{Game, Player};
use crate::scalar::{count, Scalar};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MastEntry<T> {
    pub count: T,
    pub reward_sum: T,
}

/// Per-player, per-move average playout reward.
#[derive(Clone, Debug, PartialEq)]
pub struct MastTable<T> {
    move_count: usize,
    entries: Vec<MastEntry<T>>,
}

impl<T: Scalar> MastTable<T> {
    pub fn new(move_count: usize) -> MastTable<T> {
        MastTable {
            move_count,
            entries: vec![MastEntry::default(); 2 * move_count],
        }
    }

    pub fn for_game<G: Game>() -> MastTable<T> {
        MastTable::new(G::MOVE_COUNT)
    }

    pub fn move_count(&self) -> usize {
        self.move_count
    }

    #[inline]
    pub fn entry(&self, player: Player, mv: usize) -> MastEntry<T> {
        self.entries[player.index() * self.move_count + mv]
    }

    #[inline]
    fn entry_mut(&mut self, player: Player, mv: usize) -> &mut MastEntry<T> {
        &mut self.entries[player.index() * self.move_count + mv]
    }

    /// Mean reward of `mv` for `player`, or the optimistic default 1.
    #[inline]
    pub fn value(&self, player: Player, mv: usize) -> T {
        let e = self.entry(player, mv);
        if e.count > T::zero() {
            e.reward_sum / e.count
        } else {
            T::one()
        }
    }

    /// Credits every move of a playout with its player's final reward.
    pub fn update(&mut self, record: &PlayoutRecord<T>) {
        for &(player, mv) in &record.moves {
            let r = record.reward(player);
            let e = self.entry_mut(player, mv);
            e.count = e.count + T::one();
            e.reward_sum = e.reward_sum + r;
        }
    }

    /// Multiplies every weight by `factor`.
    pub fn decay(&mut self, factor: T) {
        for e in &mut self.entries {
            e.count = e.count * factor;
            e.reward_sum = e.reward_sum * factor;
        }
    }

    pub fn clear(&mut self) {
        self.entries.fill(MastEntry::default());
    }
}

pub fn mast_value<T: Scalar>(table: &MastTable<T>, player: Player, mv: usize) -> T {
    table.value(player, mv)
}

pub fn update_mast<T: Scalar>(table: &mut MastTable<T>, record: &PlayoutRecord<T>) {
    table.update(record);
}

pub fn decay_mast<T: Scalar>(table: &mut MastTable<T>, factor: T) {
    table.decay(factor);
}

/// Moves of one playout and the final rewards.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayoutRecord<T> {
    pub moves: Vec<(Player, usize)>,
    /// Reward of Black and White, summing to 1.
    pub rewards: [T; 2],
}

impl<T: Scalar> PlayoutRecord<T> {
    pub fn from_winner(moves: Vec<(Player, usize)>, winner: Option<Player>) -> PlayoutRecord<T> {
        let rewards = match winner {
            Some(Player::Black) => [T::one(), T::zero()],
            Some(Player::White) => [T::zero(), T::one()],
            None => {
                let half = T::one() / count(2);
                [half, half]
            }
        };
        PlayoutRecord { moves, rewards }
    }

    #[inline]
    pub fn reward(&self, player: Player) -> T {
        self.rewards[player.index()]
    }
}

/// Reusable buffers for playout sampling.
#[derive(Debug, Default, Clone)]
pub struct PlayoutScratch<T> {
    candidates: Vec<usize>,
    values: Vec<T>,
    ties: Vec<usize>,
}

impl<T: Scalar> PlayoutScratch<T> {
    pub fn new() -> PlayoutScratch<T> {
        PlayoutScratch {
            candidates: Vec::new(),
            values: Vec::new(),
            ties: Vec::new(),
        }
    }

    /// Epsilon-greedy MAST choice among the playout moves of `state`.
    pub fn sample<G: Game, R: Rng + ?Sized>(
        &mut self,
        state: &G,
        table: &MastTable<T>,
        epsilon: T,
        rng: &mut R,
    ) -> usize {
        self.candidates.clear();
        state.playout_candidates(&mut self.candidates);
        let explore = rng.gen::<f64>() < epsilon.to_f64().unwrap_or(0.0);
        if explore {
            while !self.candidates.is_empty() {
                let i = rng.gen_range(0..self.candidates.len());
                let m = self.candidates[i];
                if state.is_playout_move(m) {
                    return m;
                }
                self.candidates.swap_remove(i);
            }
            return state.fallback_playout_move();
        }

        let player = state.to_move();
        self.values.clear();
        self.values
            .extend(self.candidates.iter().map(|&m| table.value(player, m)));
        while !self.candidates.is_empty() {
            let best = self
                .values
                .iter()
                .copied()
                .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
            self.ties.clear();
            self.ties.extend(
                self.values
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v == best)
                    .map(|(i, _)| i),
            );
            let i = self.ties[rng.gen_range(0..self.ties.len())];
            let m = self.candidates[i];
            if state.is_playout_move(m) {
                return m;
            }
            self.candidates.swap_remove(i);
            self.values.swap_remove(i);
        }
        state.fallback_playout_move()
    }

    /// Plays `state` out to the end (or until `move_cap` total plies).
    pub fn run<G: Game, R: Rng + ?Sized>(
        &mut self,
        mut state: G,
        table: &MastTable<T>,
        epsilon: T,
        rng: &mut R,
        move_cap: u32,
    ) -> PlayoutRecord<T> {
        let mut moves = Vec::new();
        while !state.is_terminal() && state.ply() < move_cap {
            let player = state.to_move();
            let m = self.sample(&state, table, epsilon, rng);
            state.play(m).expect("playout moves are checked for legality");
            moves.push((player, m));
        }
        PlayoutRecord::from_winner(moves, state.winner())
    }
}

pub fn sample_playout_move<G: Game, T: Scalar, R: Rng + ?Sized>(
    state: &G,
    table: &MastTable<T>,
    epsilon: T,
    rng: &mut R,
) -> usize {
    PlayoutScratch::new().sample(state, table, epsilon, rng)
}

pub fn run_playout<G: Game, T: Scalar, R: Rng + ?Sized>(
    state: G,
    table: &MastTable<T>,
    epsilon: T,
    rng: &mut R,
    move_cap: u32,
) -> PlayoutRecord<T> {
    PlayoutScratch::new().run(state, table, epsilon, rng, move_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::go::{GoState, PASS_INDEX};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn value_defaults_and_decay() {
        let mut t = MastTable::<f64>::new(82);
        assert_eq!(t.value(Player::Black, 3), 1.0);
        let rec = PlayoutRecord {
            moves: vec![(Player::Black, 3); 10],
            rewards: [1.0, 0.0],
        };
        t.update(&rec);
        assert_eq!(t.entry(Player::Black, 3).count, 10.0);
        t.entries[3].reward_sum = 7.0;
        assert!((t.value(Player::Black, 3) - 0.7).abs() < 1e-12);
        t.decay(0.2);
        let e = t.entry(Player::Black, 3);
        assert!((e.count - 2.0).abs() < 1e-12 && (e.reward_sum - 1.4).abs() < 1e-12);
        assert!((t.value(Player::Black, 3) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn decay_extremes() {
        let mut t = MastTable::<f64>::new(82);
        t.entries[5] = MastEntry {
            count: 10.0,
            reward_sum: 8.0,
        };
        let mut same = t.clone();
        same.decay(1.0);
        assert_eq!(same, t);
        t.decay(0.2);
        assert!((t.entries[5].count - 2.0).abs() < 1e-12);
        assert!((t.entries[5].reward_sum - 1.6).abs() < 1e-12);
        t.decay(0.0);
        assert!(t.entries.iter().all(|e| e.count == 0.0 && e.reward_sum == 0.0));
    }

    #[test]
    fn update_counts_each_occurrence() {
        let mut t = MastTable::<f64>::new(82);
        t.update(&PlayoutRecord {
            moves: vec![(Player::Black, 5)],
            rewards: [1.0, 0.0],
        });
        assert_eq!(
            t.entry(Player::Black, 5),
            MastEntry {
                count: 1.0,
                reward_sum: 1.0
            }
        );
        t.update(&PlayoutRecord {
            moves: vec![(Player::Black, 5)],
            rewards: [0.0, 1.0],
        });
        assert_eq!(
            t.entry(Player::Black, 5),
            MastEntry {
                count: 2.0,
                reward_sum: 1.0
            }
        );
        assert_eq!(t.entry(Player::White, 5), MastEntry::default());
    }

    #[test]
    fn terminal_input_gives_empty_record() {
        let s = GoState::new()
            .apply_move(crate::game::Move::Pass)
            .unwrap()
            .apply_move(crate::game::Move::Pass)
            .unwrap();
        let t = MastTable::<f64>::new(82);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = run_playout(s, &t, 0.4, &mut rng, 243);
        assert!(rec.moves.is_empty());
        assert_eq!(rec.rewards, [0.0, 1.0]);
    }

    #[test]
    fn greedy_follows_table() {
        let mut t = MastTable::<f64>::new(82);
        for m in 0..81 {
            t.entries[m] = MastEntry {
                count: 2.0,
                reward_sum: 1.0,
            };
        }
        t.entries[40] = MastEntry {
            count: 10.0,
            reward_sum: 9.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = GoState::new();
        for _ in 0..100 {
            assert_eq!(sample_playout_move(&s, &t, 0.0, &mut rng), 40);
        }
        assert_ne!(sample_playout_move(&s, &t, 0.0, &mut rng), PASS_INDEX);
    }
}
