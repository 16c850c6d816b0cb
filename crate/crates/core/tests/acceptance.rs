//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.
//!
//! cargo test --test acceptance

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use geoweave::dsl::{
    parse_feature, Constraint, ElementKind, Feature, FeatureAction, FeatureSet, Mode, PatternElement, Rotations, Scope,
};
use geoweave::game::{GameRules, GameState, HexRules, Line4Rules, Move, PieceTable, Status};
use geoweave::instance::{instantiate, FeatureIndex};
use geoweave::search::{
    biased_move_distribution, biased_move_distribution_counted, play_match, uniform_distribution, Agent, BiasConfig,
    MatchCounters, SearchConfig,
};
use geoweave::topology::{BoardGraph, CellId, TilingKind};
use geoweave::walk::{resolve_walk, round_turn, Turn, Walk};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{enumerate_branches, fixture, fixture_path, interpret, random_board, square_walk};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn matcher_oracle() -> Outcome {
    let hex7: Arc<dyn GameRules> = Arc::new(HexRules::new(7).unwrap());
    let line4: Arc<dyn GameRules> = Arc::new(Line4Rules::new(7, 7).unwrap());
    let cases = [("bridge.fs", &hex7), ("line4.fs", &line4), ("group3.fs", &hex7), ("thin.fs", &hex7)];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let states = 10_000;
    let mut checks = 0u64;
    let mut positives = 0u64;
    for (name, rules) in cases {
        let fs = fixture(name);
        let pieces = rules.pieces();
        for mover in 1..=2 {
            let idx = instantiate(&fs, rules.board(), pieces, mover).unwrap();
            check(!idx.is_empty(), || format!("{name}: no instances"))?;
            for _ in 0..states {
                let b = random_board(rules.board().cell_count(), pieces.state_count(), &mut rng);
                for inst in idx.iter() {
                    let fast = inst.matches(&b);
                    let slow = interpret(inst, &fs.features[inst.feature], &b, pieces, mover);
                    check(fast == slow, || {
                        format!(
                            "{name} mover {mover} anchor {} dir {}: compiled {fast}, interpreted {slow}",
                            inst.anchor, inst.start_dir
                        )
                    })?;
                    checks += 1;
                    positives += fast as u64;
                }
            }
        }
    }
    Ok(format!("4 fixture sets x 2 movers x {states} random states: {checks} instance tests agree ({positives} matches)"))
}

fn walk_oracle() -> Outcome {
    let (w, h) = (9i64, 9i64);
    let g = BoardGraph::build(TilingKind::Square { width: 9, height: 9 }).unwrap();
    let vocab: Vec<Turn> = (-3..=3).map(|k| Turn::frac(k, 4)).collect();
    let mut walks: Vec<Vec<Turn>> = vec![vec![]];
    let mut frontier = walks.clone();
    for _ in 0..4 {
        frontier = frontier.iter().flat_map(|p| vocab.iter().map(move |&t| [p.as_slice(), &[t]].concat())).collect();
        walks.extend(frontier.iter().cloned());
    }
    let mut n = 0u64;
    for y in 0..h {
        for x in 0..w {
            let anchor = g.square_cell(x, y).unwrap();
            for dir in 0..4 {
                for steps in &walks {
                    let walk = Walk::new(steps.clone());
                    let got = resolve_walk(&g, anchor, dir, &walk).unwrap();
                    let want = square_walk(w, h, x, y, dir, &walk).map(|(x, y)| g.square_cell(x, y).unwrap());
                    check(got.len() == 1 && got[0].location == want && got[0].multiplicity == 1, || {
                        format!("({x},{y}) dir {dir} walk {walk}: got {got:?}, oracle {want:?}")
                    })?;
                    n += 1;
                }
            }
        }
    }
    Ok(format!("{} walks (length <= 4, turns k/4) x 81 anchors x 4 directions: {n} resolutions agree", walks.len()))
}

fn knight_ambiguity() -> Outcome {
    let frozen: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture_path("knight_3464.json")).unwrap()).unwrap();
    let g = BoardGraph::build(TilingKind::Semi3464 { radius: 3 }).unwrap();
    let anchor = CellId(frozen["anchor"].as_u64().unwrap() as u32);
    check(g.sides(anchor) == 4, || format!("anchor {anchor} is not a square"))?;
    let knight: Walk = "{0,0,1/4}".parse().unwrap();
    let mut report = Vec::new();
    let mut wrong = Vec::new();
    for (walk, key) in [(knight.clone(), "destinations"), (knight.mirrored(), "mirrored_destinations")] {
        for dir in 0..4 {
            let resolved: Vec<CellId> =
                resolve_walk(&g, anchor, dir, &walk).unwrap().iter().map(|s| s.location.unwrap()).collect();
            let mut branches = Vec::new();
            enumerate_branches(&g, anchor, dir, walk.steps(), &mut branches);
            let oracle: Vec<CellId> = branches.into_iter().map(Option::unwrap).collect::<BTreeSet<_>>().into_iter().collect();
            check(resolved == oracle, || format!("walk {walk} dir {dir}: resolver {resolved:?}, branch oracle {oracle:?}"))?;
            let want: Vec<CellId> =
                frozen[key][dir].as_array().unwrap().iter().map(|v| CellId(v.as_u64().unwrap() as u32)).collect();
            check(resolved == want, || format!("walk {walk} dir {dir}: {resolved:?} differs from frozen {want:?}"))?;
            let via = g.neighbor(anchor, dir).map(|c| g.sides(c)).unwrap();
            report.push(format!("{walk}/d{dir}:{}", resolved.len()));
            if resolved.len() != 2 {
                wrong.push(format!("{walk} dir {dir} (first step into a {via}-gon) has {}", resolved.len()));
            }
        }
    }
    let summary = format!("square anchor {anchor}, destinations per orientation [{}]", report.join(" "));
    if wrong.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; expected 2 everywhere but {}", wrong.join("; ")))
    }
}

fn rounding_rule() -> Outcome {
    check(round_turn(Turn::frac(1, 4), 3) == 1, || "round_turn(1/4, 3) != 1".into())?;
    let mut n = 0;
    for a in [3i64, 4, 6] {
        for d in 1..=12i64 {
            for k in -(d - 1)..d {
                let t = Turn::frac(k, d);
                // Half away from zero on k*a/d, in integers.
                let x = k * a;
                let mag = (2 * x.abs() + d) / (2 * d);
                let want = if x < 0 { -mag } else { mag };
                check(round_turn(t, a as usize) == want, || {
                    format!("round_turn({t}, {a}) = {}, want {want}", round_turn(t, a as usize))
                })?;
                n += 1;
            }
        }
    }
    Ok(format!("round_turn(1/4, 3) = 1; {n} (turn, sides) pairs match half-away-from-zero"))
}

fn sample_states(rules: &dyn GameRules, count: usize, rng: &mut ChaCha8Rng) -> Vec<GameState> {
    let mut out = Vec::new();
    while out.len() < count {
        let mut s = rules.initial_state();
        while rules.status(&s) == Status::Ongoing && out.len() < count {
            out.push(s.clone());
            let legal = rules.legal_moves(&s);
            let mv = legal[rng.gen_range(0..legal.len())];
            rules.apply_in_place(&mut s, mv);
        }
    }
    out
}

fn bias_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut n = 0;
    for rules in [&HexRules::new(7).unwrap() as &dyn GameRules, &Line4Rules::new(7, 7).unwrap()] {
        let idx = instantiate(&FeatureSet::new("empty", vec![]), rules.board(), rules.pieces(), 1).unwrap();
        for s in sample_states(rules, 500, &mut rng) {
            let legal = rules.legal_moves(&s);
            let p = biased_move_distribution(&s, &legal, &idx, &BiasConfig::default());
            check(p == uniform_distribution(legal.len()), || format!("non-uniform distribution on move {}", s.move_number))?;
            n += 1;
        }
    }
    let g = BoardGraph::build(TilingKind::Square { width: 3, height: 1 }).unwrap();
    let fs = FeatureSet::new("one", vec![parse_feature("abs=0 proactive w=1 el={}:. act_to={}").unwrap()]);
    let idx = instantiate(&fs, &g, &PieceTable::two_player(), 1).unwrap();
    let s = GameState { board: geoweave::chunkset::ChunkSet::for_states(3, 3), mover: 1, last_move: None, move_number: 0 };
    let legal: Vec<Move> = g.cells().map(Move::place).collect();
    let p = biased_move_distribution(&s, &legal, &idx, &BiasConfig::default());
    check(p[0] == 0.5, || format!("single-feature action probability {} != 0.5", p[0]))?;
    Ok(format!("empty set equals uniform exactly on {n} states; single feature, 3 moves: p(action) = {}", p[0]))
}

const BRIDGE_FROZEN_A_WINS: u32 = 123;

fn hex_bridge_strength() -> Outcome {
    let rules = HexRules::new(7).unwrap();
    let fi = Arc::new(FeatureIndex::build(&fixture("bridge.fs"), rules.board(), rules.pieces()).unwrap());
    let cfg = SearchConfig { playouts_per_move: 1000, ..Default::default() };
    let a = Agent::mcts("bridge", cfg, Some(fi));
    let b = Agent::mcts("vanilla", cfg, None);
    let r = play_match(&rules, &a, &b, 200, 7).unwrap();
    let line = format!(
        "hex7, 1000 playouts, 200 games, seed 7: bridge {}-{} (as first {}/{}, as second {}/{}), win rate {:.3}, 95% CI [{:.3}, {:.3}]",
        r.a_wins, r.b_wins, r.a_as_first.wins, r.a_as_first.games, r.a_as_second.wins, r.a_as_second.games, r.win_rate, r.ci_low, r.ci_high
    );
    check(r.win_rate > 0.5 && r.ci_low > 0.5, || format!("{line}: not above 0.5"))?;
    check(r.a_wins == BRIDGE_FROZEN_A_WINS, || format!("{line}: differs from frozen {BRIDGE_FROZEN_A_WINS} wins"))?;
    Ok(line)
}

fn line4_strategy() -> Outcome {
    let rules = Line4Rules::new(7, 7).unwrap();
    let fi = Arc::new(FeatureIndex::build(&fixture("line4.fs"), rules.board(), rules.pieces()).unwrap());
    let r = play_match(&rules, &Agent::policy("line4", Some(fi)), &Agent::policy("uniform", None), 1000, 11).unwrap();
    let line = format!(
        "line4-7x7, 1000 games, seed 11: biased {}-{} ({} draws), win rate {:.3}, 95% CI [{:.3}, {:.3}]",
        r.a_wins, r.b_wins, r.draws, r.win_rate, r.ci_low, r.ci_high
    );
    check(r.win_rate > 0.55 && r.ci_low > 0.5, || format!("{line}: below threshold"))?;
    Ok(line)
}

fn reactive_fast_path() -> Outcome {
    let rules = HexRules::new(7).unwrap();
    let mut fs = fixture("bridge.fs");
    fs.features.push(parse_feature("rel proactive w=1.0 el={}:. el={0}:o act_to={}").unwrap());
    let fi = FeatureIndex::build(&fs, rules.board(), rules.pieces()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let states: Vec<GameState> =
        sample_states(&rules, 400, &mut rng).into_iter().filter(|s| s.last_move.is_some()).take(100).collect();
    check(states.len() == 100, || "not enough sampled moves".into())?;
    let (mut tested, mut full) = (0usize, 0usize);
    for s in &states {
        let idx = fi.for_player(s.mover);
        let legal = rules.legal_moves(s);
        let mut counters = MatchCounters::default();
        #[cfg(debug_assertions)]
        geoweave::chunkset::reset_word_tests();
        biased_move_distribution_counted(s, &legal, idx, &BiasConfig::default(), &mut counters);
        let keyed = idx.reactive_for(s.last_move.unwrap().to).len();
        check(counters.reactive_tests == keyed as u64, || {
            format!("move {}: {} reactive tests, {keyed} keyed", s.move_number, counters.reactive_tests)
        })?;
        check(counters.proactive_tests == idx.proactive.len() as u64, || "proactive test count".into())?;
        #[cfg(debug_assertions)]
        {
            let words = s.board.words().len() as u64;
            let want = (keyed + idx.proactive.len()) as u64 * words;
            let got = geoweave::chunkset::word_tests();
            check(got == want, || format!("move {}: {got} word tests, expected {want}", s.move_number))?;
        }
        tested += keyed;
        full += idx.reactive_len();
    }
    Ok(format!(
        "100 playout moves: {tested} reactive tests executed, equal to the keyed lists (full reactive set would be {full})"
    ))
}

fn random_turn(rng: &mut ChaCha8Rng) -> Turn {
    let d = rng.gen_range(1..=12i64);
    Turn::frac(rng.gen_range(-(d - 1)..d), d)
}

fn random_walk(rng: &mut ChaCha8Rng, max: usize) -> Walk {
    let n = rng.gen_range(0..=max);
    Walk::new((0..n).map(|_| random_turn(rng)).collect())
}

fn random_kind(rng: &mut ChaCha8Rng) -> ElementKind {
    match rng.gen_range(0..6) {
        0 => ElementKind::Off,
        1 => ElementKind::Empty,
        2 => ElementKind::Friend,
        3 => ElementKind::Enemy,
        4 => ElementKind::Player(rng.gen_range(0..5)),
        _ => ElementKind::Item(rng.gen_range(0..20)),
    }
}

fn random_feature(rng: &mut ChaCha8Rng) -> Feature {
    let pattern = (0..rng.gen_range(1..=5))
        .map(|_| {
            let mut cs = Vec::new();
            if rng.gen_bool(0.8) {
                cs.push(Constraint::is(random_kind(rng)));
            }
            for _ in 0..rng.gen_range(if cs.is_empty() { 1 } else { 0 }..=2) {
                cs.push(Constraint::not(random_kind(rng)));
            }
            PatternElement::new(random_walk(rng, 4), cs)
        })
        .collect();
    let mode = if rng.gen_bool(0.5) { Mode::Reactive } else { Mode::Proactive };
    Feature {
        pattern,
        action: FeatureAction { to: random_walk(rng, 3), from: rng.gen_bool(0.3).then(|| random_walk(rng, 3)) },
        weight: match rng.gen_range(0..3) {
            0 => rng.gen_range(-10.0..10.0),
            1 => rng.gen_range(-20..=20) as f64 * 0.5,
            _ => rng.gen_range(-1e-6..1e6),
        },
        mode,
        scope: if rng.gen_bool(0.7) { Scope::Relative } else { Scope::Absolute(CellId(rng.gen_range(0..200))) },
        rotations: if rng.gen_bool(0.5) {
            Rotations::All
        } else {
            Rotations::explicit((0..rng.gen_range(1..=4)).map(|_| random_turn(rng)).collect())
        },
        reflections: rng.gen_bool(0.5),
        last_move: (mode == Mode::Reactive).then(|| random_walk(rng, 3)),
    }
}

fn dsl_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut glyphs: BTreeSet<String> = BTreeSet::new();
    for i in 0..10_000 {
        let f = random_feature(&mut rng);
        check(f.validate().is_ok(), || format!("generator produced an invalid feature: {f}"))?;
        let text = f.to_string();
        let once = parse_feature(&text).map_err(|e| format!("case {i}: `{text}`: {e}"))?;
        let twice = parse_feature(&once.to_string()).map_err(|e| format!("case {i}: reparse: {e}"))?;
        check(once == f && twice == f, || format!("case {i}: `{text}` did not survive the round trip"))?;
        for el in &f.pattern {
            if el.constraints.len() > 1 {
                glyphs.insert(",".into());
            }
            for c in &el.constraints {
                let g = match c.kind {
                    ElementKind::Player(_) => "P".to_string(),
                    ElementKind::Item(_) => "I".to_string(),
                    k => k.to_string(),
                };
                glyphs.insert(if c.negated { format!("!{g}") } else { g });
            }
        }
    }
    let all = ["-", ".", "o", "x", "P", "I", "!-", "!.", "!o", "!x", "!P", "!I", ","];
    let missing: Vec<&str> = all.iter().copied().filter(|g| !glyphs.contains(*g)).collect();
    check(missing.is_empty(), || format!("glyphs never generated: {missing:?}"))?;
    Ok(format!("10000 random features round-trip; glyphs covered: {}", all.join(" ")))
}

fn reproducibility() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_geoweave");
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| -> Vec<u8> {
        let path = dir.path().join(out);
        let status = Command::new(bin)
            .args(["match", "--game", "hex7", "--a", &fixture_path("bridge.fs"), "--games", "4", "--playouts", "200"])
            .args(["--seed", "7", "--workers", "1", "--out"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(status.status.success(), "match failed: {}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(path.join("match.json")).unwrap()
    };
    let (a, b) = (run("one"), run("two"));
    check(a == b, || "match.json differs between runs".into())?;

    let mut svgs = 0;
    for (game, set) in [("hex7", "bridge"), ("line4-7x7", "line4"), ("hex7", "group3"), ("hex7", "thin")] {
        let out = dir.path().join(format!("svg-{set}"));
        let st = Command::new(bin)
            .args(["render", "--game", game, "--features", &fixture_path(&format!("{set}.fs")), "--out"])
            .arg(&out)
            .output()
            .unwrap();
        check(st.status.success(), || format!("render {set} failed"))?;
        for entry in std::fs::read_dir(&out).unwrap() {
            let p = entry.unwrap().path();
            if p.extension().is_some_and(|e| e == "svg") {
                let name = p.file_name().unwrap().to_string_lossy().into_owned();
                let golden = std::fs::read(fixture_path(&format!("golden/{name}"))).map_err(|e| format!("golden {name}: {e}"))?;
                check(std::fs::read(&p).unwrap() == golden, || format!("{name} differs from golden"))?;
                svgs += 1;
            }
        }
    }
    Ok(format!("match.json byte-identical across runs ({} bytes); {svgs} SVGs equal their golden files", a.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("matcher oracle equivalence", matcher_oracle),
        ("walk oracle equivalence", walk_oracle),
        ("knight ambiguity on 3.4.6.4", knight_ambiguity),
        ("rounding rule", rounding_rule),
        ("bias correctness", bias_correctness),
        ("hex bridge strength", hex_bridge_strength),
        ("line4 strategy fixture", line4_strategy),
        ("reactive fast path", reactive_fast_path),
        ("dsl round-trip fuzz", dsl_round_trip),
        ("reproducibility", reproducibility),
    ];
    let only: Vec<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{n:>2}] {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{n:>2}] {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
