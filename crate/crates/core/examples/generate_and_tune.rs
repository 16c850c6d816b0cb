//! Enumerates candidate features for Line4, scores a small hand-picked set
//! with the playout policy, and hill-climbs its weights.
//!
//! cargo run --release --example generate_and_tune -- [budget] [games]

use geoweave::dsl::{parse_feature, FeatureSet};
use geoweave::game::Line4Rules;
use geoweave::gen::{evaluate_feature_set, generate_candidates, hill_climb_weights, Evaluator, GenConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u32> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let budget = args.first().copied().unwrap_or(12);
    let games = args.get(1).copied().unwrap_or(200);
    let rules = Line4Rules::new(7, 7)?;

    let candidates = generate_candidates(&rules, &GenConfig::default())?;
    println!("{} candidates; the first few:", candidates.len());
    for f in candidates.iter().take(5) {
        println!("  {f}");
    }

    // Completing a line of four is good; the starting weight says otherwise.
    let fs = FeatureSet::new(
        "start",
        vec![
            parse_feature("rel proactive w=-2.0 el={}:. el={0}:o el={0,0}:o el={0,0,0}:o act_to={}")?,
            parse_feature("rel proactive w=0.0 el={}:. el={0}:o el={0,0}:o act_to={}")?,
        ],
    );
    let base = evaluate_feature_set(&fs, &rules, games, 5, &Evaluator::Policy)?;
    println!("start: win rate {:.3} [{:.3}, {:.3}]", base.win_rate, base.ci_low, base.ci_high);
    let tuned = hill_climb_weights(&fs, &rules, budget, 2.0, games, 5, &Evaluator::Policy)?;
    for rec in &tuned.history {
        println!("  weights {:?} -> {:.3}", rec.weights, rec.win_rate);
    }
    println!("best: {:.3}\n{}", tuned.best_record.win_rate, tuned.best.to_text());
    Ok(())
}
