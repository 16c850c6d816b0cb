//! Where the knight walk {0,0,1/4} lands from the central square, triangle
//! and hexagon of the 3.4.6.4 tiling, for every start direction and both
//! reflections.
//!
//! cargo run --example knight_3464 -- [radius]

use geoweave::topology::{BoardGraph, CellId, TilingKind};
use geoweave::walk::{resolve_walk, Walk};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let radius = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(3);
    let g = BoardGraph::build(TilingKind::Semi3464 { radius })?;
    let knight: Walk = "{0,0,1/4}".parse()?;
    let mid = g.cells().map(|c| g.center(c)).fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    let mid = (mid.0 / g.cell_count() as f64, mid.1 / g.cell_count() as f64);
    for sides in [4, 3, 6] {
        let anchor: CellId = g
            .cells()
            .filter(|&c| g.sides(c) == sides)
            .min_by(|&a, &b| {
                let d = |c: CellId| (g.center(c).x - mid.0).powi(2) + (g.center(c).y - mid.1).powi(2);
                d(a).total_cmp(&d(b)).then(a.cmp(&b))
            })
            .ok_or("no square cells")?;
        println!("{sides}-sided anchor {anchor}");
        for walk in [knight.clone(), knight.mirrored()] {
            for dir in 0..sides {
                let facing = g.neighbor(anchor, dir).map(|n| g.sides(n));
                let sites = resolve_walk(&g, anchor, dir, &walk)?;
                let cells: Vec<String> = sites.iter().map(|s| s.location.map_or("off".into(), |c| c.to_string())).collect();
                println!("walk {walk} dir {dir} (next cell has {:?} sides): {} -> [{}]", facing, cells.len(), cells.join(", "));
            }
        }
    }
    Ok(())
}
