//! Parses a feature set file, reports errors by line and column, and prints
//! the canonical text of every feature.
//!
//! cargo run --example parse_features -- [path]

use geoweave::dsl::{load_feature_set, Mode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/group3.fs").into());
    let fs = match load_feature_set(&path) {
        Ok(fs) => fs,
        Err(e) => {
            eprintln!("{path}:\n{e}");
            std::process::exit(2);
        }
    };
    println!("set `{}`: {} features", fs.name, fs.len());
    for (i, f) in fs.features.iter().enumerate() {
        let mode = if f.mode == Mode::Reactive { "reactive" } else { "proactive" };
        println!("{i:>3} {mode:<9} {:>2} elements  w={:<6} {f}", f.pattern.len(), f.weight);
    }
    print!("\n{}", fs.to_text());
    Ok(())
}
