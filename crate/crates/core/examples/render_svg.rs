//! Writes one SVG per feature of a feature set.
//!
//! cargo run --example render_svg -- [features.fs] [game] [out-dir]

use geoweave::dsl::load_feature_set;
use geoweave::game::game_by_name;
use geoweave::render::render_feature_set;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/bridge.fs").into());
    let game = args.next().unwrap_or_else(|| "hex7".into());
    let out = std::path::PathBuf::from(args.next().unwrap_or_else(|| "svg".into()));
    let rules = game_by_name(&game)?;
    let fs = load_feature_set(&path)?;
    std::fs::create_dir_all(&out)?;
    for (name, svg) in render_feature_set(rules.as_ref(), &fs)? {
        std::fs::write(out.join(&name), svg)?;
        println!("{}", out.join(name).display());
    }
    Ok(())
}
