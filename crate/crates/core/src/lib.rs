//! Memory-bounded Monte-Carlo tree search for 9×9 Go.
//!
//! Searches run on a fixed-capacity node pool that recycles least recently
//! used leaves. Variants: UCT and GRAVE, their recycling forms, and two-level
//! searches that replace each top-level expansion with a nested search.
//!
//! Numeric code is generic over [`scalar::Scalar`]; the aliases below fix it
//! to `f64`.
//!
//! ```
//! use grave_mcts::{search, GoState, Params, Variant};
//!
//! let params = Params::single(Variant::Grave, 200).with_seed(7);
//! let result = search(&GoState::new(), &params).unwrap();
//! assert_eq!(result.total_playouts, 200);
//! ```

pub mod agent;
pub mod arena;
pub mod bench;
pub mod game;
pub mod gtp;
pub mod playout;
pub mod policy;
pub mod pool;
pub mod scalar;
pub mod search;
pub mod stats;

pub use agent::{parse_agent, AgentSpec};
pub use game::{Game, GameError, GoState, Move, Player, Point};
pub use playout::MastTable;
pub use pool::{NodeHandle, NodePool, PoolError};
pub use scalar::Scalar;
pub use search::{play_game, run_search, search, MatchRecord, SearchError, SearchParams, SearchResult, Variant};
pub use stats::{agresti_coull, summarize, AgentId, MatchSummary};

pub type Pool = pool::NodePool<f64>;
pub type Mast = playout::MastTable<f64>;
pub type Params = search::SearchParams<f64>;
pub type Policy = policy::PolicyParams<f64>;
pub type Agent = agent::AgentSpec<f64>;
pub type Summary = stats::MatchSummary<f64>;
pub type Outcome = search::SearchResult<f64>;
pub type Experiment = arena::ExperimentConfig<f64>;
