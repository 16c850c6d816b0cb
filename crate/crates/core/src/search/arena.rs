//! Head-to-head match play with side swapping and paired seeds.

use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::game::{GameRules, GameState, Move, PlayerId, Status};
use crate::instance::FeatureIndex;
use crate::search::bias::BiasConfig;
use crate::search::mcts::{mcts_best_move, SearchConfig};
use crate::search::playout::Playout;
use crate::search::SearchError;

/// How an agent picks its move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentKind {
    /// Full UCT search; playouts are biased when the agent has features.
    Mcts(SearchConfig),
    /// One sample from the playout policy, with no search.
    Policy(BiasConfig),
}

#[derive(Debug, Clone)]
pub struct Agent {
    pub label: String,
    pub kind: AgentKind,
    pub features: Option<Arc<FeatureIndex>>,
}

impl Agent {
    pub fn mcts(label: impl Into<String>, cfg: SearchConfig, features: Option<Arc<FeatureIndex>>) -> Self {
        Agent { label: label.into(), kind: AgentKind::Mcts(cfg), features }
    }

    pub fn policy(label: impl Into<String>, features: Option<Arc<FeatureIndex>>) -> Self {
        Agent { label: label.into(), kind: AgentKind::Policy(BiasConfig::default()), features }
    }

    fn choose(
        &self,
        rules: &dyn GameRules,
        state: &GameState,
        rng: &mut ChaCha8Rng,
        scratch: &mut Playout,
    ) -> Result<Move, SearchError> {
        let features = self.features.as_deref();
        match &self.kind {
            AgentKind::Mcts(cfg) => {
                let cfg = SearchConfig { seed: rng.next_u64(), ..*cfg };
                mcts_best_move(rules, state, features, &cfg)
            }
            AgentKind::Policy(bias) => scratch.choose(rules, state, features, bias, rng).ok_or(SearchError::TerminalState),
        }
    }
}

/// Results of one agent from one seat.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SideTally {
    pub games: u32,
    pub wins: u32,
    pub losses: u32,
    pub draws: u32,
}

impl SideTally {
    fn record(&mut self, status: Status, seat: PlayerId) {
        self.games += 1;
        match status {
            Status::Win(p) if p == seat => self.wins += 1,
            Status::Win(_) => self.losses += 1,
            _ => self.draws += 1,
        }
    }
}

/// Match outcome from agent A's point of view. Draws count half.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    pub game: String,
    pub agent_a: String,
    pub agent_b: String,
    pub games: u32,
    pub seed: u64,
    pub a_wins: u32,
    pub b_wins: u32,
    pub draws: u32,
    pub a_as_first: SideTally,
    pub a_as_second: SideTally,
    pub first_player_wins: u32,
    pub win_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

const Z95: f64 = 1.959963984540054;

/// Wilson score interval at 95% for `score` successes out of `n` trials.
pub fn wilson_interval(score: f64, n: u32) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = score / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Rounding can push an endpoint past p at the extremes.
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

fn seat_rng(seed: u64, pair: u32, seat: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * pair as u64 + seat);
    rng
}

fn play_game(rules: &dyn GameRules, seats: [&Agent; 2], rngs: &mut [ChaCha8Rng; 2]) -> Result<Status, SearchError> {
    let mut state = rules.initial_state();
    let mut scratch = Playout::new(rules.board().cell_count());
    let cap = 4 * rules.board().cell_count() as u32;
    let mut status = rules.status(&state);
    while !status.is_terminal() {
        if state.move_number >= cap {
            return Ok(Status::Draw);
        }
        let seat = state.mover as usize - 1;
        let mv = seats[seat].choose(rules, &state, &mut rngs[seat], &mut scratch)?;
        rules.apply_in_place(&mut state, mv);
        status = rules.status_after_move(&state);
    }
    Ok(status)
}

/// Plays `games` games between `a` and `b`, A moving first in even-numbered
/// games. Both games of a pair give each seat the same random stream.
pub fn play_match(rules: &dyn GameRules, a: &Agent, b: &Agent, games: u32, seed: u64) -> Result<MatchReport, SearchError> {
    play_match_observed(rules, a, b, games, seed, |_, _| {})
}

/// As [`play_match`], calling `observe(game_index, result)` after each game.
pub fn play_match_observed(
    rules: &dyn GameRules,
    a: &Agent,
    b: &Agent,
    games: u32,
    seed: u64,
    mut observe: impl FnMut(u32, Status),
) -> Result<MatchReport, SearchError> {
    if games == 0 {
        return Err(SearchError::ZeroGames);
    }
    if games % 2 == 1 {
        return Err(SearchError::OddGames(games));
    }
    let (mut first, mut second) = (SideTally::default(), SideTally::default());
    let mut first_player_wins = 0;
    for g in 0..games {
        let pair = g / 2;
        let a_first = g % 2 == 0;
        let seats = if a_first { [a, b] } else { [b, a] };
        let mut rngs = [seat_rng(seed, pair, 0), seat_rng(seed, pair, 1)];
        let status = play_game(rules, seats, &mut rngs)?;
        if status == Status::Win(1) {
            first_player_wins += 1;
        }
        if a_first {
            first.record(status, 1);
        } else {
            second.record(status, 2);
        }
        observe(g, status);
    }
    let a_wins = first.wins + second.wins;
    let draws = first.draws + second.draws;
    let score = a_wins as f64 + 0.5 * draws as f64;
    let (ci_low, ci_high) = wilson_interval(score, games);
    Ok(MatchReport {
        game: rules.name().to_string(),
        agent_a: a.label.clone(),
        agent_b: b.label.clone(),
        games,
        seed,
        a_wins,
        b_wins: games - a_wins - draws,
        draws,
        a_as_first: first,
        a_as_second: second,
        first_player_wins,
        win_rate: score / games as f64,
        ci_low,
        ci_high,
    })
}
