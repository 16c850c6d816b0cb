//! Feature-biased random player against a uniform random player on Line4.
//!
//! cargo run --release --example line4_policy_match -- [games] [width] [height]

use std::sync::Arc;

use geoweave::dsl::load_feature_set;
use geoweave::game::{GameRules, Line4Rules};
use geoweave::instance::FeatureIndex;
use geoweave::search::{play_match, Agent};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u32> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let games = args.first().copied().unwrap_or(1000);
    let (w, h) = (args.get(1).copied().unwrap_or(7), args.get(2).copied().unwrap_or(7));

    let rules = Line4Rules::new(w, h)?;
    let fs = load_feature_set(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/line4.fs"))?;
    let fi = Arc::new(FeatureIndex::build(&fs, rules.board(), rules.pieces())?);
    println!("{} instances per player", fi.for_player(1).len());
    let report = play_match(&rules, &Agent::policy("line4", Some(fi)), &Agent::policy("uniform", None), games, 11)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
