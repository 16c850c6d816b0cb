//! Candidate feature generation and weight tuning by match play.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dsl::{Constraint, ElementKind, Feature, FeatureAction, FeatureSet, Mode, PatternElement, Rotations, Scope};
use crate::game::{GameKind, GameRules};
use crate::instance::{FeatureIndex, InstanceError};
use crate::search::{play_match, Agent, SearchConfig, SearchError};
use crate::walk::{Turn, Walk};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("tuning budget must be at least 1 evaluation")]
    ZeroBudget,
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    /// Elements per feature, counting the mandatory empty anchor.
    pub max_elements: usize,
    pub max_walk_length: usize,
    /// Turns a walk step may take; `None` picks the board's edge turns.
    pub turn_vocabulary: Option<Vec<Turn>>,
    /// Also emit reactive variants keyed on each enemy element.
    pub include_reactive: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_elements: 3, max_walk_length: 2, turn_vocabulary: None, include_reactive: false }
    }
}

const CANDIDATE_KINDS: [ElementKind; 4] = [ElementKind::Empty, ElementKind::Friend, ElementKind::Enemy, ElementKind::Off];

/// Edge turns of the board's cells, folded into `(-1/2, 1/2]`.
pub fn default_vocabulary(kind: GameKind) -> Vec<Turn> {
    let n = match kind {
        GameKind::Hex { .. } => 6,
        GameKind::Line4 { .. } => 4,
    };
    (0..n).map(|k| fold(Turn::frac(k, n))).collect::<BTreeSet<_>>().into_iter().collect()
}

fn fold(t: Turn) -> Turn {
    let (n, d) = (t.numerator(), t.denominator());
    if 2 * n > d {
        Turn::frac(n - d, d)
    } else if 2 * n <= -d {
        Turn::frac(n + d, d)
    } else {
        t
    }
}

fn add(a: Turn, b: Turn) -> Turn {
    fold(Turn::frac(a.numerator() * b.denominator() + b.numerator() * a.denominator(), a.denominator() * b.denominator()))
}

/// Orders turns by size, then clockwise before anticlockwise, so that the
/// straight-ahead walk sorts first.
fn turn_key(t: Turn) -> (i64, i64, bool) {
    (t.numerator().abs(), t.denominator(), t.numerator() < 0)
}

type ElemKey = (Vec<(i64, i64, bool)>, ElementKind);

type Elem = (Vec<Turn>, ElementKind);

fn elem_key(walk: &[Turn], kind: ElementKind) -> ElemKey {
    (walk.iter().map(|&t| turn_key(t)).collect(), kind)
}

/// Smallest image of an element set under rotation by a vocabulary turn and
/// reflection, as element keys plus the walks that produced them.
fn canonical(elems: &[Elem], vocab: &[Turn]) -> Vec<Elem> {
    let mut best: Option<(Vec<ElemKey>, Vec<Elem>)> = None;
    for &r in vocab {
        for mirror in [false, true] {
            let mut image: Vec<Elem> = elems
                .iter()
                .map(|(w, k)| {
                    let mut w: Vec<Turn> = if mirror { w.iter().map(|t| fold(t.negated())).collect() } else { w.clone() };
                    w[0] = add(w[0], r);
                    (w, *k)
                })
                .collect();
            image.sort_by_key(|(w, k)| elem_key(w, *k));
            let key: Vec<ElemKey> = image.iter().map(|(w, k)| elem_key(w, *k)).collect();
            if best.as_ref().is_none_or(|(b, _)| key < *b) {
                best = Some((key, image));
            }
        }
    }
    best.map(|(_, e)| e).unwrap_or_default()
}

fn walks(vocab: &[Turn], max_len: usize) -> Vec<Vec<Turn>> {
    let half = Turn::frac(1, 2);
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Turn>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &t in vocab {
                // A half turn after the first step walks straight back.
                if !w.is_empty() && t == half {
                    continue;
                }
                let mut v = w.clone();
                v.push(t);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn placement_feature(extra: &[Elem], mode: Mode, last: Option<Walk>) -> Feature {
    let mut pattern = vec![PatternElement::new(Walk::empty(), vec![Constraint::is(ElementKind::Empty)])];
    pattern.extend(extra.iter().map(|(w, k)| PatternElement::new(Walk::new(w.clone()), vec![Constraint::is(*k)])));
    Feature {
        pattern,
        action: FeatureAction { to: Walk::empty(), from: None },
        weight: 1.0,
        mode,
        scope: Scope::Relative,
        rotations: Rotations::All,
        reflections: true,
        last_move: last,
    }
}

/// Enumerates candidate features for a placement game. Every candidate
/// contains the minimum pattern: an empty anchor that is also the action.
/// Further elements combine distinct walks with one of `. o x -`; sets that
/// differ only by rotation or reflection are emitted once.
pub fn generate_candidates(rules: &dyn GameRules, cfg: &GenConfig) -> Result<Vec<Feature>, GenError> {
    if cfg.max_elements == 0 || cfg.max_walk_length == 0 {
        return Err(GenError::InvalidConfig("bounds must be at least 1".into()));
    }
    let vocab: Vec<Turn> = match &cfg.turn_vocabulary {
        Some(v) if v.is_empty() => return Err(GenError::InvalidConfig("empty turn vocabulary".into())),
        Some(v) => v.iter().map(|&t| fold(t)).collect::<BTreeSet<_>>().into_iter().collect(),
        None => default_vocabulary(rules.kind()),
    };
    let options: Vec<Elem> =
        walks(&vocab, cfg.max_walk_length).into_iter().flat_map(|w| CANDIDATE_KINDS.map(|k| (w.clone(), k))).collect();

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    // Depth-first over increasing option indices.
    fn extend(
        options: &[Elem],
        vocab: &[Turn],
        start: usize,
        left: usize,
        chosen: &mut Vec<usize>,
        seen: &mut BTreeSet<Vec<ElemKey>>,
        out: &mut Vec<Vec<Elem>>,
    ) {
        let elems: Vec<_> = chosen.iter().map(|&i| options[i].clone()).collect();
        let canon = canonical(&elems, vocab);
        if seen.insert(canon.iter().map(|(w, k)| elem_key(w, *k)).collect()) {
            out.push(canon);
        }
        if left == 0 {
            return;
        }
        for i in start..options.len() {
            if chosen.iter().any(|&c| options[c].0 == options[i].0) {
                continue;
            }
            chosen.push(i);
            extend(options, vocab, i + 1, left - 1, chosen, seen, out);
            chosen.pop();
        }
    }
    let mut sets = Vec::new();
    extend(&options, &vocab, 0, cfg.max_elements - 1, &mut chosen, &mut seen, &mut sets);
    sets.sort_by_key(|s| (s.len(), s.iter().map(|(w, k)| elem_key(w, *k)).collect::<Vec<_>>()));

    for set in &sets {
        out.push(placement_feature(set, Mode::Proactive, None));
        if cfg.include_reactive {
            for (w, k) in set {
                if *k == ElementKind::Enemy {
                    out.push(placement_feature(set, Mode::Reactive, Some(Walk::new(w.clone()))));
                }
            }
        }
    }
    Ok(out)
}

/// Which agents an evaluation pits against each other. Both sides use the
/// same settings; only the feature set differs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluator {
    /// Feature-biased MCTS against uniform-playout MCTS.
    Mcts(SearchConfig),
    /// Feature-biased playout policy against the uniform random player.
    Policy,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::Mcts(SearchConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalRecord {
    pub feature_set: String,
    /// SHA-256 of the feature set's text form.
    pub feature_set_hash: String,
    pub weights: Vec<f64>,
    pub games: u32,
    pub win_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

pub fn feature_set_hash(fs: &FeatureSet) -> String {
    hex::encode(Sha256::digest(fs.to_text().as_bytes()))
}

/// Plays the feature-biased agent against the unbiased one, swapping sides
/// every game.
pub fn evaluate_feature_set(
    fs: &FeatureSet,
    rules: &dyn GameRules,
    games: u32,
    seed: u64,
    evaluator: &Evaluator,
) -> Result<EvalRecord, GenError> {
    let fi = Arc::new(FeatureIndex::build(fs, rules.board(), rules.pieces())?);
    let (a, b) = match evaluator {
        Evaluator::Mcts(cfg) => (Agent::mcts("biased", *cfg, Some(fi)), Agent::mcts("baseline", *cfg, None)),
        Evaluator::Policy => (Agent::policy("biased", Some(fi)), Agent::policy("baseline", None)),
    };
    let report = play_match(rules, &a, &b, games, seed)?;
    Ok(EvalRecord {
        feature_set: fs.name.clone(),
        feature_set_hash: feature_set_hash(fs),
        weights: fs.features.iter().map(|f| f.weight).collect(),
        games,
        win_rate: report.win_rate,
        ci_low: report.ci_low,
        ci_high: report.ci_high,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub best: FeatureSet,
    pub best_record: EvalRecord,
    /// Every evaluation in order, the starting set first.
    pub history: Vec<EvalRecord>,
}

/// Coordinate-wise hill climb on feature weights. Each step tries `+step`
/// then `-step` on one weight and keeps the change only if the win rate
/// strictly improves. Every evaluation reuses `seed`, so candidates are
/// compared on the same random streams. Stops when `budget` evaluations
/// (including the initial one) are spent or a full pass finds nothing.
pub fn hill_climb_weights(
    fs: &FeatureSet,
    rules: &dyn GameRules,
    budget: u32,
    step: f64,
    games: u32,
    seed: u64,
    evaluator: &Evaluator,
) -> Result<TuneResult, GenError> {
    if budget == 0 {
        return Err(GenError::ZeroBudget);
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(GenError::InvalidConfig(format!("step {step} must be positive")));
    }
    let mut best = fs.clone();
    let mut best_record = evaluate_feature_set(&best, rules, games, seed, evaluator)?;
    let mut history = vec![best_record.clone()];
    'outer: loop {
        let mut improved = false;
        for i in 0..best.features.len() {
            for delta in [step, -step] {
                if history.len() as u32 >= budget {
                    break 'outer;
                }
                let mut cand = best.clone();
                cand.features[i].weight += delta;
                let rec = evaluate_feature_set(&cand, rules, games, seed, evaluator)?;
                history.push(rec.clone());
                if rec.win_rate > best_record.win_rate {
                    best = cand;
                    best_record = rec;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(TuneResult { best, best_record, history })
}
