use rand::Rng;

use crate::game::{GameRules, GameState, Move, Status};
use crate::instance::FeatureIndex;
use crate::search::bias::{BiasConfig, MatchCounters, MoveScorer};
use crate::search::SearchError;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlayoutConfig {
    /// Plies after which the playout is scored a draw; defaults to four
    /// times the cell count.
    pub max_length: Option<u32>,
    pub bias: BiasConfig,
}

/// Playout driver holding per-worker scratch buffers.
#[derive(Debug, Clone)]
pub(crate) struct Playout {
    legal: Vec<Move>,
    scorer: MoveScorer,
    pub counters: MatchCounters,
}

impl Playout {
    pub fn new(cells: usize) -> Self {
        Playout { legal: Vec::new(), scorer: MoveScorer::new(cells), counters: MatchCounters::default() }
    }

    /// Picks one move for the mover: biased by `features` when given,
    /// uniform otherwise. `None` if there are no legal moves.
    pub fn choose<R: Rng>(
        &mut self,
        rules: &dyn GameRules,
        state: &GameState,
        features: Option<&FeatureIndex>,
        bias: &BiasConfig,
        rng: &mut R,
    ) -> Option<Move> {
        rules.legal_moves_into(state, &mut self.legal);
        self.pick(state, features, bias, rng)
    }

    fn pick<R: Rng>(
        &mut self,
        state: &GameState,
        features: Option<&FeatureIndex>,
        bias: &BiasConfig,
        rng: &mut R,
    ) -> Option<Move> {
        let n = self.legal.len();
        if n == 0 {
            return None;
        }
        let Some(fi) = features else {
            return Some(self.legal[rng.gen_range(0..n)]);
        };
        let total = self.scorer.score(state, &self.legal, fi.for_player(state.mover), bias, &mut self.counters);
        let mut r = rng.gen::<f64>() * total;
        for (i, s) in self.scorer.scores.iter().enumerate() {
            if r < *s {
                return Some(self.legal[i]);
            }
            r -= s;
        }
        Some(self.legal[n - 1])
    }

    /// Plays `state` out to the end in place and returns the result.
    pub fn run<R: Rng>(
        &mut self,
        rules: &dyn GameRules,
        state: &mut GameState,
        features: Option<&FeatureIndex>,
        cfg: &PlayoutConfig,
        rng: &mut R,
    ) -> Status {
        let deferred = rules.settles_when_full();
        let cap = cfg.max_length.unwrap_or(4 * rules.board().cell_count() as u32);
        let mut plies = 0;
        loop {
            if plies >= cap {
                return match rules.status(state) {
                    Status::Ongoing => Status::Draw,
                    s => s,
                };
            }
            rules.legal_moves_into(state, &mut self.legal);
            let Some(mv) = self.pick(state, features, &cfg.bias, rng) else {
                return match rules.status(state) {
                    Status::Ongoing => Status::Draw,
                    s => s,
                };
            };
            rules.apply_in_place(state, mv);
            plies += 1;
            if !deferred {
                let s = rules.status_after_move(state);
                if s.is_terminal() {
                    return s;
                }
            }
        }
    }
}

/// Plays a copy of `state` to a terminal result, sampling each ply from the
/// biased distribution (or uniformly when `features` is `None`).
pub fn run_playout<R: Rng>(
    rules: &dyn GameRules,
    state: &GameState,
    features: Option<&FeatureIndex>,
    rng: &mut R,
    cfg: &PlayoutConfig,
) -> Result<Status, SearchError> {
    if rules.status(state).is_terminal() {
        return Err(SearchError::TerminalState);
    }
    let mut s = state.clone();
    Ok(Playout::new(rules.board().cell_count()).run(rules, &mut s, features, cfg, rng))
}
