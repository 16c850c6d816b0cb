//! Plain UCT: UCB1 selection, one expansion per iteration, a (possibly
//! feature-biased) playout, mean-value backup. Multiple workers search
//! independent trees and merge root visit counts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{GameRules, GameState, Move, PlayerId, Status};
use crate::instance::FeatureIndex;
use crate::search::bias::{BiasConfig, MoveScorer};
use crate::search::playout::{Playout, PlayoutConfig};
use crate::search::SearchError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub playouts_per_move: u32,
    pub uct_exploration: f64,
    pub seed: u64,
    pub max_playout_length: Option<u32>,
    /// Root-parallel workers; 1 gives exactly reproducible searches.
    pub workers: usize,
    pub bias: BiasConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            playouts_per_move: 1000,
            uct_exploration: std::f64::consts::SQRT_2,
            seed: 0,
            max_playout_length: None,
            workers: 1,
            bias: BiasConfig::default(),
        }
    }
}

/// Visit statistics of one root child.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootChild {
    pub mv: Move,
    pub visits: u32,
    /// Mean reward for the player making `mv`.
    pub value: f64,
}

struct Node {
    mv: Option<Move>,
    parent: Option<u32>,
    /// Player who made `mv`.
    player: PlayerId,
    children: Vec<u32>,
    untried: Vec<Move>,
    /// Prior probability of `mv` from the biased policy (selection biasing).
    prior: f64,
    untried_priors: Vec<f64>,
    visits: u32,
    reward: f64,
    status: Status,
}

struct Tree<'a> {
    rules: &'a dyn GameRules,
    features: Option<&'a FeatureIndex>,
    cfg: &'a SearchConfig,
    nodes: Vec<Node>,
    playout: Playout,
    scorer: MoveScorer,
}

impl<'a> Tree<'a> {
    fn new(rules: &'a dyn GameRules, root: &GameState, features: Option<&'a FeatureIndex>, cfg: &'a SearchConfig) -> Self {
        let cells = rules.board().cell_count();
        let mut t =
            Tree { rules, features, cfg, nodes: Vec::new(), playout: Playout::new(cells), scorer: MoveScorer::new(cells) };
        let root_node = t.make_node(root, None, None, 0, 1.0, Status::Ongoing);
        t.nodes.push(root_node);
        t
    }

    fn selection_bias(&self) -> Option<&'a FeatureIndex> {
        self.features.filter(|_| self.cfg.bias.use_in_selection)
    }

    fn make_node(
        &mut self,
        state: &GameState,
        mv: Option<Move>,
        parent: Option<u32>,
        player: PlayerId,
        prior: f64,
        status: Status,
    ) -> Node {
        let untried = if status.is_terminal() { Vec::new() } else { self.rules.legal_moves(state) };
        let untried_priors = match self.selection_bias() {
            Some(fi) if !untried.is_empty() => {
                let mut counters = Default::default();
                let total = self.scorer.score(state, &untried, fi.for_player(state.mover), &self.cfg.bias, &mut counters);
                self.scorer.scores.iter().map(|s| s / total).collect()
            }
            _ => Vec::new(),
        };
        Node { mv, parent, player, children: Vec::new(), untried, prior, untried_priors, visits: 0, reward: 0.0, status }
    }

    fn select_child(&self, n: u32) -> u32 {
        let node = &self.nodes[n as usize];
        let ln = (node.visits.max(1) as f64).ln();
        let biased = self.selection_bias().is_some();
        let mut best = node.children[0];
        let mut best_score = f64::NEG_INFINITY;
        for &c in &node.children {
            let ch = &self.nodes[c as usize];
            let v = ch.visits as f64;
            let mut score = ch.reward / v + self.cfg.uct_exploration * (ln / v).sqrt();
            if biased {
                score += ch.prior / (1.0 + v);
            }
            if score > best_score {
                best_score = score;
                best = c;
            }
        }
        best
    }

    fn iterate(&mut self, root: &GameState, rng: &mut ChaCha8Rng) {
        let mut state = root.clone();
        let mut n = 0u32;
        while self.nodes[n as usize].untried.is_empty() && !self.nodes[n as usize].children.is_empty() {
            n = self.select_child(n);
            self.rules.apply_in_place(&mut state, self.nodes[n as usize].mv.expect("child has a move"));
        }
        if !self.nodes[n as usize].untried.is_empty() {
            let node = &mut self.nodes[n as usize];
            let i = if node.untried_priors.is_empty() {
                rng.gen_range(0..node.untried.len())
            } else {
                let mut r = rng.gen::<f64>() * node.untried_priors.iter().sum::<f64>();
                let mut pick = node.untried_priors.len() - 1;
                for (k, p) in node.untried_priors.iter().enumerate() {
                    if r < *p {
                        pick = k;
                        break;
                    }
                    r -= p;
                }
                pick
            };
            let mv = node.untried.swap_remove(i);
            let prior = if node.untried_priors.is_empty() { 1.0 } else { node.untried_priors.swap_remove(i) };
            let player = state.mover;
            self.rules.apply_in_place(&mut state, mv);
            let status = self.rules.status_after_move(&state);
            let child = self.make_node(&state, Some(mv), Some(n), player, prior, status);
            let id = self.nodes.len() as u32;
            self.nodes.push(child);
            self.nodes[n as usize].children.push(id);
            n = id;
        }
        let result = match self.nodes[n as usize].status {
            Status::Ongoing => {
                let cfg = PlayoutConfig { max_length: self.cfg.max_playout_length, bias: self.cfg.bias };
                self.playout.run(self.rules, &mut state, self.features, &cfg, rng)
            }
            s => s,
        };
        let mut cur = Some(n);
        while let Some(c) = cur {
            let node = &mut self.nodes[c as usize];
            node.visits += 1;
            node.reward += result.score_for(node.player);
            cur = node.parent;
        }
    }

    fn root_children(&self) -> Vec<RootChild> {
        self.nodes[0]
            .children
            .iter()
            .map(|&c| {
                let ch = &self.nodes[c as usize];
                RootChild { mv: ch.mv.expect("child has a move"), visits: ch.visits, value: ch.reward / ch.visits.max(1) as f64 }
            })
            .collect()
    }
}

fn search_worker(
    rules: &dyn GameRules,
    state: &GameState,
    features: Option<&FeatureIndex>,
    cfg: &SearchConfig,
    seed: u64,
    iterations: u32,
) -> Vec<RootChild> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = Tree::new(rules, state, features, cfg);
    for _ in 0..iterations {
        tree.iterate(state, &mut rng);
    }
    tree.root_children()
}

/// Runs the search and returns per-move root statistics in legal-move order.
pub fn mcts_root_stats(
    rules: &dyn GameRules,
    state: &GameState,
    features: Option<&FeatureIndex>,
    cfg: &SearchConfig,
) -> Result<Vec<RootChild>, SearchError> {
    if cfg.playouts_per_move == 0 {
        return Err(SearchError::ZeroPlayouts);
    }
    if rules.status(state).is_terminal() {
        return Err(SearchError::TerminalState);
    }
    let workers = cfg.workers.max(1);
    let per_worker: Vec<u32> = (0..workers as u32)
        .map(|w| cfg.playouts_per_move / workers as u32 + (w < cfg.playouts_per_move % workers as u32) as u32)
        .collect();
    let results: Vec<Vec<RootChild>> = if workers == 1 {
        vec![search_worker(rules, state, features, cfg, cfg.seed, cfg.playouts_per_move)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = per_worker
                .iter()
                .enumerate()
                .map(|(w, &iters)| {
                    s.spawn(move || search_worker(rules, state, features, cfg, cfg.seed.wrapping_add(w as u64), iters))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
        })
    };

    let legal = rules.legal_moves(state);
    let mut merged: Vec<RootChild> = legal.iter().map(|&mv| RootChild { mv, visits: 0, value: 0.0 }).collect();
    for r in results {
        for ch in r {
            if let Some(m) = merged.iter_mut().find(|m| m.mv == ch.mv) {
                m.value += ch.value * ch.visits as f64;
                m.visits += ch.visits;
            }
        }
    }
    for m in &mut merged {
        if m.visits > 0 {
            m.value /= m.visits as f64;
        }
    }
    Ok(merged)
}

/// Most-visited root move; ties go to the higher mean value, then to the
/// earlier legal move.
pub fn mcts_best_move(
    rules: &dyn GameRules,
    state: &GameState,
    features: Option<&FeatureIndex>,
    cfg: &SearchConfig,
) -> Result<Move, SearchError> {
    let stats = mcts_root_stats(rules, state, features, cfg)?;
    let mut best = &stats[0];
    for s in &stats[1..] {
        if s.visits > best.visits || (s.visits == best.visits && s.value > best.value) {
            best = s;
        }
    }
    Ok(best.mv)
}

/// Shuffles `moves` with a seeded generator; handy for examples and tests.
pub fn shuffled(moves: &[Move], seed: u64) -> Vec<Move> {
    let mut v = moves.to_vec();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    v
}
