//! Resolves a few walks from the middle of each supported tiling and prints
//! where they land, with multiplicities where a walk forks.
//!
//! cargo run --example walks_on_tilings -- [walk]

use geoweave::topology::{BoardGraph, CellId, TilingKind};
use geoweave::walk::{resolve_walk, Walk};

fn middle(g: &BoardGraph) -> CellId {
    let n = g.cell_count() as f64;
    let (sx, sy) = g.cells().map(|c| g.center(c)).fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    let d = |c: CellId| (g.center(c).x - sx / n).powi(2) + (g.center(c).y - sy / n).powi(2);
    g.cells().min_by(|&a, &b| d(a).total_cmp(&d(b))).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let walks: Vec<Walk> = match std::env::args().nth(1) {
        Some(w) => vec![w.parse()?],
        None => ["{}", "{0}", "{0,0}", "{0,1/4}", "{0,1/6}", "{1/2}"].iter().map(|w| w.parse()).collect::<Result<_, _>>()?,
    };
    let tilings = [
        TilingKind::Square { width: 7, height: 7 },
        TilingKind::HexRhombus { size: 7 },
        TilingKind::Triangular { rows: 8 },
        TilingKind::Semi3464 { radius: 2 },
    ];
    for kind in tilings {
        let g = BoardGraph::build(kind)?;
        let anchor = middle(&g);
        println!("{kind:?}: {} cells, anchor {anchor} ({} sides)", g.cell_count(), g.sides(anchor));
        for walk in &walks {
            let sites = resolve_walk(&g, anchor, 0, walk)?;
            let shown: Vec<String> = sites
                .iter()
                .map(|s| {
                    let at = s.location.map_or("off".to_string(), |c| c.to_string());
                    if s.multiplicity > 1 {
                        format!("{at}x{}", s.multiplicity)
                    } else {
                        at
                    }
                })
                .collect();
            println!("  {walk:<10} -> [{}]", shown.join(", "));
        }
    }
    Ok(())
}
