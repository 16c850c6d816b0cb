//! Compiles the bridge feature on a Hex board, then plays random moves and
//! lists the reactive instances that fire after each opponent move.
//!
//! cargo run --example instances_and_matching -- [size] [moves]

use geoweave::dsl::load_feature_set;
use geoweave::game::{GameRules, HexRules, Status};
use geoweave::instance::FeatureIndex;
use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u32> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let size = args.first().copied().unwrap_or(7);
    let moves = args.get(1).copied().unwrap_or(12);
    let rules = HexRules::new(size)?;
    let fs = load_feature_set(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/bridge.fs"))?;
    let fi = FeatureIndex::build(&fs, rules.board(), rules.pieces())?;
    for p in 1..=2 {
        let idx = fi.for_player(p);
        println!("player {p}: {} proactive, {} reactive instances", idx.proactive.len(), idx.reactive_len());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut state = rules.initial_state();
    for _ in 0..moves {
        if rules.status(&state) != Status::Ongoing {
            break;
        }
        let mv = *rules.legal_moves(&state).choose(&mut rng).unwrap();
        rules.apply_in_place(&mut state, mv);
        let idx = fi.for_player(state.mover);
        let keyed = idx.reactive_for(mv.to);
        let firing: Vec<String> =
            keyed.iter().filter(|i| i.matches(&state.board)).map(|i| format!("@{} (w={})", i.action_to, i.weight)).collect();
        println!(
            "move {:>2}: {mv}, {} instances keyed, player {} answers at [{}]",
            state.move_number,
            keyed.len(),
            state.mover,
            firing.join(", ")
        );
    }
    Ok(())
}
