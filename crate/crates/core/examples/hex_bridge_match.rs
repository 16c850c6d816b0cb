//! Bridge-biased MCTS against vanilla MCTS on Hex.
//!
//! cargo run --release --example hex_bridge_match -- [games] [playouts] [size]

use std::sync::Arc;
use std::time::Instant;

use geoweave::dsl::load_feature_set;
use geoweave::game::{GameRules, HexRules};
use geoweave::instance::FeatureIndex;
use geoweave::search::{play_match_observed, Agent, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u32> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let games = args.first().copied().unwrap_or(10);
    let playouts = args.get(1).copied().unwrap_or(1000);
    let size = args.get(2).copied().unwrap_or(7);

    let rules = HexRules::new(size)?;
    let fs = load_feature_set(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/bridge.fs"))?;
    let fi = Arc::new(FeatureIndex::build(&fs, rules.board(), rules.pieces())?);
    let cfg = SearchConfig { playouts_per_move: playouts, ..Default::default() };
    let a = Agent::mcts("bridge", cfg, Some(fi));
    let b = Agent::mcts("vanilla", cfg, None);

    let start = Instant::now();
    let report = play_match_observed(&rules, &a, &b, games, 7, |g, s| {
        eprintln!("game {g}: {s:?} ({:.1}s)", start.elapsed().as_secs_f64());
    })?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
