#![allow(dead_code)]

use geoweave::chunkset::ChunkSet;
use geoweave::dsl::{load_feature_set, ElementKind, Feature, FeatureSet};
use geoweave::game::{PieceTable, PlayerId};
use geoweave::instance::FeatureInstance;
use geoweave::walk::{round_turn, Walk};
use rand::Rng;

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> FeatureSet {
    load_feature_set(fixture_path(name)).unwrap()
}

/// Whether one constraint holds for a chunk value (`None` = off-board).
pub fn constraint_holds(kind: ElementKind, value: Option<u32>, pieces: &PieceTable, mover: PlayerId) -> bool {
    match (kind, value) {
        (ElementKind::Off, v) => v.is_none(),
        (_, None) => false,
        (ElementKind::Empty, Some(v)) => v == 0,
        (ElementKind::Friend, Some(v)) => v > 0 && pieces.owner(v) == mover,
        (ElementKind::Enemy, Some(v)) => v > 0 && pieces.owner(v) != mover,
        (ElementKind::Player(n), Some(v)) => v > 0 && pieces.owner(v) as u32 == n,
        (ElementKind::Item(n), Some(v)) => v == n,
    }
}

/// Element-by-element evaluation of an instance's pattern, straight from
/// the feature text and the instance's resolved sites.
pub fn interpret(inst: &FeatureInstance, feature: &Feature, state: &ChunkSet, pieces: &PieceTable, mover: PlayerId) -> bool {
    feature.pattern.iter().zip(&inst.element_sites).all(|(el, site)| {
        let value = site.map(|c| state.get(c));
        if site.is_none() && !el.requires_off_board() {
            return false;
        }
        el.constraints.iter().all(|c| {
            if c.kind == ElementKind::Off && c.negated {
                return site.is_some();
            }
            constraint_holds(c.kind, value, pieces, mover) != c.negated
        })
    })
}

pub fn random_board<R: Rng>(cells: usize, states: u32, rng: &mut R) -> ChunkSet {
    let mut b = ChunkSet::for_states(cells, states);
    let empty_bias = rng.gen_range(0.0..1.0);
    for c in 0..cells {
        let v = if rng.gen_bool(empty_bias) { 0 } else { rng.gen_range(0..states) };
        b.set(geoweave::topology::CellId(c as u32), v).unwrap();
    }
    b
}

/// Coordinate arithmetic for walks on a square grid: facing 0..4 is
/// N, E, S, W, turns are rounded to quarter turns.
pub fn square_walk(w: i64, h: i64, x: i64, y: i64, dir: usize, walk: &Walk) -> Option<(i64, i64)> {
    const D: [(i64, i64); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];
    let (mut x, mut y, mut f) = (x, y, dir as i64);
    for &t in walk.steps() {
        f = (f + round_turn(t, 4)).rem_euclid(4);
        let (dx, dy) = D[f as usize];
        x += dx;
        y += dy;
        if !(0..w).contains(&x) || !(0..h).contains(&y) {
            return None;
        }
    }
    Some((x, y))
}

/// Independent enumeration of every branch of a walk: each step turns by
/// the rounded fraction of the current cell's sides (both neighbours on an
/// exact half), and entering an odd-sided cell forks the facing.
pub fn enumerate_branches(
    g: &geoweave::topology::BoardGraph,
    cell: geoweave::topology::CellId,
    facing: usize,
    turns: &[geoweave::walk::Turn],
    out: &mut Vec<Option<geoweave::topology::CellId>>,
) {
    let Some((t, rest)) = turns.split_first() else {
        out.push(Some(cell));
        return;
    };
    let a = g.sides(cell) as i64;
    let (num, den) = (t.numerator() * a, t.denominator());
    let choices: Vec<i64> = if num % den != 0 && (2 * num) % den == 0 {
        let lo = num.div_euclid(den);
        vec![lo, lo + 1]
    } else {
        let mag = (2 * num.abs() + den) / (2 * den);
        vec![if num < 0 { -mag } else { mag }]
    };
    for k in choices {
        let dir = (facing as i64 + k).rem_euclid(a) as usize;
        let Some(next) = g.neighbor(cell, dir) else {
            out.push(None);
            continue;
        };
        let back = g.back_index(cell, dir).unwrap();
        let an = g.sides(next);
        let facings = if an.is_multiple_of(2) {
            vec![(back + an / 2) % an]
        } else {
            vec![(back + (an - 1) / 2) % an, (back + an.div_ceil(2)) % an]
        };
        for f in facings {
            enumerate_branches(g, next, f, rest, out);
        }
    }
}
