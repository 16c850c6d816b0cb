//! Monte Carlo tree search with feature-biased playouts, and match play
//! between search agents.

mod arena;
mod bias;
mod mcts;
mod playout;

use thiserror::Error;

pub use arena::{play_match, play_match_observed, wilson_interval, Agent, AgentKind, MatchReport, SideTally};
pub use bias::{biased_move_distribution, biased_move_distribution_counted, uniform_distribution, BiasConfig, MatchCounters};
pub use mcts::{mcts_best_move, mcts_root_stats, shuffled, RootChild, SearchConfig};
pub use playout::{run_playout, PlayoutConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("state is already terminal")]
    TerminalState,
    #[error("playouts per move must be at least 1")]
    ZeroPlayouts,
    #[error("game count must be positive")]
    ZeroGames,
    #[error("game count {0} is odd; sides are swapped every game")]
    OddGames(u32),
}
