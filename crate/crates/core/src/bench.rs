//! Engine throughput and memory report.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{Game, GoState};
use crate::playout::MastTable;
use crate::pool::NodePool;
use crate::scalar::Scalar;
use crate::search::{run_search, SearchError, SearchParams};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub agent: String,
    pub positions: u32,
    pub playouts: u64,
    pub seconds: f64,
    pub playouts_per_sec: f64,
    /// Largest live node count of any search, roots excluded.
    pub peak_nodes: u32,
    pub node_budget: u32,
    pub recycled_total: u64,
    pub node_bytes: usize,
    pub amaf_bytes_per_node: usize,
}

impl BenchReport {
    pub fn bytes_per_node(&self) -> usize {
        self.node_bytes + self.amaf_bytes_per_node
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "agent               {}", self.agent)?;
        writeln!(f, "positions           {}", self.positions)?;
        writeln!(f, "playouts            {}", self.playouts)?;
        writeln!(f, "seconds             {:.3}", self.seconds)?;
        writeln!(f, "playouts/sec        {:.0}", self.playouts_per_sec)?;
        writeln!(
            f,
            "peak nodes          {} (budget {})",
            self.peak_nodes, self.node_budget
        )?;
        writeln!(f, "recycled_total      {}", self.recycled_total)?;
        writeln!(f, "node bytes          {}", self.node_bytes)?;
        writeln!(f, "amaf bytes/node     {}", self.amaf_bytes_per_node)?;
        write!(f, "bytes/node          {}", self.bytes_per_node())
    }
}

/// Positions reached by `i` uniformly random moves from the empty board.
pub fn bench_positions(count: u32, seed: u64) -> Vec<GoState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count as usize);
    let mut moves = Vec::new();
    for i in 0..count {
        let mut s = GoState::new();
        for _ in 0..(i * 7) % 60 {
            moves.clear();
            s.playout_candidates(&mut moves);
            moves.retain(|&m| s.is_playout_move(m));
            if moves.is_empty() {
                break;
            }
            s.play(moves[rng.gen_range(0..moves.len())])
                .expect("filtered for legality");
        }
        out.push(s);
    }
    out
}

/// Searches `positions` positions with `params` and reports throughput and
/// memory use.
pub fn run_bench<T: Scalar>(label: &str, params: &SearchParams<T>, positions: u32) -> Result<BenchReport, SearchError> {
    params.validate()?;
    let slots = if params.variant.uses_amaf() {
        GoState::MOVE_COUNT
    } else {
        0
    };
    let probe = NodePool::<T>::new(2, slots)?;
    let mut mast = MastTable::for_game::<GoState>();
    let (mut playouts, mut peak, mut recycled) = (0u64, 0u32, 0u64);
    let start = Instant::now();
    for (i, s) in bench_positions(positions, params.seed).iter().enumerate() {
        let p = params.with_seed(params.seed.wrapping_add(i as u64));
        let r = run_search(s, &p, &mut mast)?;
        playouts += r.total_playouts;
        peak = peak.max(r.peak_nodes);
        recycled += r.recycled_total;
    }
    let seconds = start.elapsed().as_secs_f64();
    Ok(BenchReport {
        agent: label.to_string(),
        positions,
        playouts,
        seconds,
        playouts_per_sec: if seconds > 0.0 { playouts as f64 / seconds } else { 0.0 },
        peak_nodes: peak,
        node_budget: params.capacity,
        recycled_total: recycled,
        node_bytes: probe.node_bytes(),
        amaf_bytes_per_node: probe.amaf_bytes_per_node(),
    })
}
