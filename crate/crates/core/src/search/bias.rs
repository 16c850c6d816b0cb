//! Feature-biased move distribution.
//!
//! Every legal move starts with the same base score. Matching reactive
//! instances keyed by the opponent's last move, then all proactive
//! instances, add their weight to the score of their action. Scores are
//! clamped to a positive floor and normalized.

use crate::game::{GameState, Move};
use crate::instance::{FeatureInstance, InstanceIndex};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasConfig {
    /// Lower bound on a move's score after all weights are added.
    pub floor: f64,
    /// Score every legal move starts with.
    pub base_score: f64,
    /// Also bias MCTS expansion and selection, not just playouts.
    pub use_in_selection: bool,
}

impl Default for BiasConfig {
    fn default() -> Self {
        BiasConfig { floor: 0.01, base_score: 1.0, use_in_selection: false }
    }
}

/// Instance match tests executed, split by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchCounters {
    pub reactive_tests: u64,
    pub proactive_tests: u64,
}

const NONE: u32 = u32::MAX;

/// Reusable scratch space for scoring moves without allocating per ply.
#[derive(Debug, Clone)]
pub(crate) struct MoveScorer {
    head: Vec<u32>,
    next: Vec<u32>,
    pub scores: Vec<f64>,
}

impl MoveScorer {
    pub fn new(cells: usize) -> Self {
        MoveScorer { head: vec![NONE; cells], next: Vec::new(), scores: Vec::new() }
    }

    /// Fills `self.scores` for `legal` and returns their sum.
    pub fn score(
        &mut self,
        state: &GameState,
        legal: &[Move],
        idx: &InstanceIndex,
        cfg: &BiasConfig,
        counters: &mut MatchCounters,
    ) -> f64 {
        if self.head.len() < state.board.cell_count() {
            self.head.resize(state.board.cell_count(), NONE);
        }
        self.scores.clear();
        self.scores.resize(legal.len(), cfg.base_score);
        self.next.clear();
        self.next.resize(legal.len(), NONE);
        for (i, mv) in legal.iter().enumerate() {
            let h = &mut self.head[mv.to.index()];
            self.next[i] = *h;
            *h = i as u32;
        }

        let (head, next, scores) = (&self.head, &self.next, &mut self.scores);
        let mut credit = |inst: &FeatureInstance| {
            let mut j = head[inst.action_to.index()];
            while j != NONE {
                let mv = legal[j as usize];
                if inst.action_from.is_none() || mv.from == inst.action_from {
                    scores[j as usize] += inst.weight;
                }
                j = next[j as usize];
            }
        };
        if let Some(last) = state.last_move {
            for inst in idx.reactive_for(last.to) {
                counters.reactive_tests += 1;
                if inst.matches(&state.board) {
                    credit(inst);
                }
            }
        }
        for inst in &idx.proactive {
            counters.proactive_tests += 1;
            if inst.matches(&state.board) {
                credit(inst);
            }
        }

        for mv in legal {
            self.head[mv.to.index()] = NONE;
        }
        let mut total = 0.0;
        for s in &mut self.scores {
            if *s < cfg.floor {
                *s = cfg.floor;
            }
            total += *s;
        }
        total
    }
}

/// Probability of each move in `legal` under the biased playout policy.
pub fn biased_move_distribution(state: &GameState, legal: &[Move], idx: &InstanceIndex, cfg: &BiasConfig) -> Vec<f64> {
    biased_move_distribution_counted(state, legal, idx, cfg, &mut MatchCounters::default())
}

pub fn biased_move_distribution_counted(
    state: &GameState,
    legal: &[Move],
    idx: &InstanceIndex,
    cfg: &BiasConfig,
    counters: &mut MatchCounters,
) -> Vec<f64> {
    let mut scorer = MoveScorer::new(state.board.cell_count());
    let total = scorer.score(state, legal, idx, cfg, counters);
    scorer.scores.iter().map(|s| s / total).collect()
}

/// Uniform distribution over `n` moves, for comparison with the biased one.
pub fn uniform_distribution(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}
