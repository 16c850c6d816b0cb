//! Frozen values; a change here means behaviour changed.

mod common;

use geoweave::game::{GameRules, HexRules, Line4Rules};
use geoweave::gen::{feature_set_hash, generate_candidates, GenConfig};
use geoweave::instance::instantiate;
use geoweave::topology::{BoardGraph, CellId, TilingKind};
use geoweave::walk::{resolve_walk, Walk};

use common::{fixture, fixture_path};

#[test]
fn candidate_counts() {
    let cfg = GenConfig::default();
    assert_eq!(generate_candidates(&Line4Rules::new(7, 7).unwrap(), &cfg).unwrap().len(), 295);
    assert_eq!(generate_candidates(&HexRules::new(7).unwrap(), &cfg).unwrap().len(), 921);
}

#[test]
fn fixture_instance_counts() {
    let line4 = Line4Rules::new(7, 7).unwrap();
    let idx = instantiate(&fixture("line4.fs"), line4.board(), line4.pieces(), 1).unwrap();
    assert_eq!(idx.len(), 562);
    let hex = HexRules::new(7).unwrap();
    let idx = instantiate(&fixture("bridge.fs"), hex.board(), hex.pieces(), 1).unwrap();
    assert_eq!(idx.proactive.len(), 0);
    assert!(idx.reactive_len() > 0);
}

#[test]
fn knight_destinations_on_3464() {
    let frozen: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture_path("knight_3464.json")).unwrap()).unwrap();
    let g = BoardGraph::build(TilingKind::Semi3464 { radius: 3 }).unwrap();
    let anchor = CellId(frozen["anchor"].as_u64().unwrap() as u32);
    let knight: Walk = frozen["walk"].as_str().unwrap().parse().unwrap();
    for (walk, key) in [(knight.clone(), "destinations"), (knight.mirrored(), "mirrored_destinations")] {
        for dir in 0..4 {
            let got: Vec<u64> =
                resolve_walk(&g, anchor, dir, &walk).unwrap().iter().map(|s| s.location.unwrap().0 as u64).collect();
            let want: Vec<u64> = frozen[key][dir].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
            assert_eq!(got, want, "{walk} dir {dir}");
        }
    }
}

#[test]
fn fixture_hashes_are_stable_under_reserialization() {
    for name in ["bridge.fs", "line4.fs", "group3.fs", "thin.fs"] {
        let fs = fixture(name);
        let again = geoweave::dsl::parse_feature_set(&fs.to_text()).unwrap();
        assert_eq!(feature_set_hash(&fs), feature_set_hash(&again), "{name}");
    }
}
