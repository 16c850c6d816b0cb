//! Board graphs: cells, their clockwise edge-neighbor lists and the board's
//! rotations and reflections.
//!
//! Every tiling is built from cell polygons in screen coordinates (y grows
//! downwards). A cell's neighbor slots follow its edges clockwise, starting
//! at the edge whose outward bearing is closest to north going clockwise
//! (bearing 0 inclusive). This fixes the conventions:
//!
//! * square cells: `[N, E, S, W]`;
//! * hex cells (pointy-top, rhombus board): `[NE, E, SE, SW, W, NW]`;
//! * triangles and the 3.4.6.4 tiling: the same rule applied per cell.
//!
//! Edges without a neighboring cell keep an off-board slot (`None`).

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::walk::Turn;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("invalid tiling parameters: {0}")]
    InvalidParameters(String),
    #[error("direction {dir} out of range for cell {cell}")]
    DirectionOutOfRange { cell: CellId, dir: usize },
    #[error("direction {dir} of cell {cell} leads off the board")]
    OffBoard { cell: CellId, dir: usize },
    #[error("tiling construction produced an inconsistent graph: {0}")]
    Inconsistent(String),
}

/// Dense cell index in `[0, cell_count)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId(pub u32);

impl CellId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TilingKind {
    Square {
        width: u32,
        height: u32,
    },
    /// An `n x n` Hex board.
    HexRhombus {
        size: u32,
    },
    /// A triangle of triangles with `rows` rows.
    Triangular {
        rows: u32,
    },
    /// Rhombitrihexagonal (3.4.6.4) patch around a central hexagon; hexagons
    /// lie within `radius` hex-steps of the center.
    Semi3464 {
        radius: u32,
    },
}

/// A board automorphism: a cell permutation plus a per-cell direction map.
/// Rotations send direction `d` at `c` to `d + offset[c]` at `map[c]`;
/// reflections send it to `offset[c] - d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symmetry {
    pub map: Vec<CellId>,
    pub offset: Vec<u8>,
    pub reflected: bool,
    /// Rotation part; reflections are this rotation applied after the
    /// board's base reflection.
    pub rotation: Turn,
}

impl Symmetry {
    pub fn map_cell(&self, c: CellId) -> CellId {
        self.map[c.index()]
    }

    pub fn map_dir(&self, board: &BoardGraph, c: CellId, d: usize) -> usize {
        let a = board.sides(c) as i64;
        let off = self.offset[c.index()] as i64;
        let out = if self.reflected { off - d as i64 } else { off + d as i64 };
        out.rem_euclid(a) as usize
    }

    pub fn is_identity(&self) -> bool {
        !self.reflected && self.map.iter().enumerate().all(|(i, c)| c.index() == i) && self.offset.iter().all(|&o| o == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone)]
pub struct BoardGraph {
    kind: TilingKind,
    neighbors: Vec<Vec<Option<CellId>>>,
    back: Vec<Vec<u8>>,
    centers: Vec<Point>,
    polygons: Vec<Vec<Point>>,
    symmetries: Vec<Symmetry>,
}

const NO_BACK: u8 = u8::MAX;
const SQRT3: f64 = 1.732_050_807_568_877_2;

impl BoardGraph {
    pub fn build(kind: TilingKind) -> Result<Self, TopologyError> {
        let polygons = match kind {
            TilingKind::Square { width, height } => {
                if width == 0 || height == 0 {
                    return Err(TopologyError::InvalidParameters(format!("square {width}x{height}")));
                }
                square_polygons(width, height)
            }
            TilingKind::HexRhombus { size } => {
                if size == 0 {
                    return Err(TopologyError::InvalidParameters("hex size 0".into()));
                }
                hex_polygons(size)
            }
            TilingKind::Triangular { rows } => {
                if rows == 0 {
                    return Err(TopologyError::InvalidParameters("triangular rows 0".into()));
                }
                triangle_polygons(rows)
            }
            TilingKind::Semi3464 { radius } => {
                if radius == 0 {
                    return Err(TopologyError::InvalidParameters("3.4.6.4 radius 0".into()));
                }
                semi3464_polygons(radius)
            }
        };
        let mut g = from_polygons(kind, polygons)?;
        g.symmetries = match kind {
            TilingKind::Square { width, height } => square_symmetries(&g, width, height)?,
            TilingKind::HexRhombus { size } => hex_symmetries(&g, size)?,
            _ => Vec::new(),
        };
        Ok(g)
    }

    pub fn kind(&self) -> TilingKind {
        self.kind
    }

    pub fn cell_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.neighbors.len() as u32).map(CellId)
    }

    #[inline]
    pub fn sides(&self, c: CellId) -> usize {
        self.neighbors[c.index()].len()
    }

    /// Neighbor slots of `c`, clockwise, `None` for off-board.
    #[inline]
    pub fn neighbors(&self, c: CellId) -> &[Option<CellId>] {
        &self.neighbors[c.index()]
    }

    #[inline]
    pub fn neighbor(&self, c: CellId, d: usize) -> Option<CellId> {
        self.neighbors[c.index()][d]
    }

    /// Slot index at which the neighbor in direction `d` of `c` lists `c`.
    pub fn back_index(&self, c: CellId, d: usize) -> Result<usize, TopologyError> {
        if c.index() >= self.cell_count() || d >= self.sides(c) {
            return Err(TopologyError::DirectionOutOfRange { cell: c, dir: d });
        }
        match self.back[c.index()][d] {
            NO_BACK => Err(TopologyError::OffBoard { cell: c, dir: d }),
            b => Ok(b as usize),
        }
    }

    #[inline]
    pub(crate) fn back_index_unchecked(&self, c: CellId, d: usize) -> usize {
        self.back[c.index()][d] as usize
    }

    pub fn center(&self, c: CellId) -> Point {
        self.centers[c.index()]
    }

    pub fn polygon(&self, c: CellId) -> &[Point] {
        &self.polygons[c.index()]
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    pub fn are_adjacent(&self, a: CellId, b: CellId) -> bool {
        self.neighbors(a).contains(&Some(b))
    }

    /// Cell at column `x`, row `y` (row 0 on top) of a square board.
    pub fn square_cell(&self, x: i64, y: i64) -> Option<CellId> {
        match self.kind {
            TilingKind::Square { width, height } if (0..width as i64).contains(&x) && (0..height as i64).contains(&y) => {
                Some(CellId((y * width as i64 + x) as u32))
            }
            _ => None,
        }
    }

    /// Cell at axial coordinates `(q, r)` of a Hex board; `r` is the row.
    pub fn hex_cell(&self, q: i64, r: i64) -> Option<CellId> {
        match self.kind {
            TilingKind::HexRhombus { size } if (0..size as i64).contains(&q) && (0..size as i64).contains(&r) => {
                Some(CellId((r * size as i64 + q) as u32))
            }
            _ => None,
        }
    }

    /// Checks the structural invariants: slot counts, symmetric adjacency,
    /// and that every symmetry is an adjacency-preserving bijection.
    pub fn validate(&self) -> Result<(), TopologyError> {
        let bad = |m: String| Err(TopologyError::Inconsistent(m));
        for c in self.cells() {
            if self.sides(c) < 3 || self.back[c.index()].len() != self.sides(c) {
                return bad(format!("cell {c} has bad slot count"));
            }
            for d in 0..self.sides(c) {
                if let Some(n) = self.neighbor(c, d) {
                    let b = self.back_index(c, d)?;
                    if self.neighbor(n, b) != Some(c) {
                        return bad(format!("edge {c}->{n} is not mirrored"));
                    }
                }
            }
        }
        for s in &self.symmetries {
            let mut seen = vec![false; self.cell_count()];
            for c in self.cells() {
                let m = s.map_cell(c);
                if std::mem::replace(&mut seen[m.index()], true) {
                    return bad("symmetry is not a bijection".into());
                }
                for d in 0..self.sides(c) {
                    let image = self.neighbor(m, s.map_dir(self, c, d));
                    if image != self.neighbor(c, d).map(|n| s.map_cell(n)) {
                        return bad(format!("symmetry breaks adjacency at {c}"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn bearing(from: Point, to: Point) -> f64 {
    let deg = (to.x - from.x).atan2(-(to.y - from.y)).to_degrees();
    let b = if deg < 0.0 { deg + 360.0 } else { deg };
    if b > 360.0 - 1e-7 {
        0.0
    } else {
        b
    }
}

fn point_key(p: Point) -> (i64, i64) {
    ((p.x * 1e6).round() as i64, (p.y * 1e6).round() as i64)
}

fn centroid(poly: &[Point]) -> Point {
    let n = poly.len() as f64;
    Point { x: poly.iter().map(|p| p.x).sum::<f64>() / n, y: poly.iter().map(|p| p.y).sum::<f64>() / n }
}

/// Builds the graph from convex cell polygons given in cell-id order.
fn from_polygons(kind: TilingKind, raw: Vec<Vec<Point>>) -> Result<BoardGraph, TopologyError> {
    let mut centers = Vec::with_capacity(raw.len());
    let mut polygons = Vec::with_capacity(raw.len());
    let mut edge_keys: Vec<Vec<(i64, i64)>> = Vec::with_capacity(raw.len());
    for poly in raw {
        let c = centroid(&poly);
        let mut verts = poly;
        verts.sort_by(|a, b| {
            let ta = (a.y - c.y).atan2(a.x - c.x);
            let tb = (b.y - c.y).atan2(b.x - c.x);
            ta.total_cmp(&tb)
        });
        let n = verts.len();
        let mut edges: Vec<(f64, Point)> = (0..n)
            .map(|i| {
                let (p, q) = (verts[i], verts[(i + 1) % n]);
                let mid = Point { x: (p.x + q.x) / 2.0, y: (p.y + q.y) / 2.0 };
                (bearing(c, mid), mid)
            })
            .collect();
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Rotate the outline so it starts at the first slot's edge.
        let first_mid = edges[0].1;
        let start = (0..n)
            .find(|&i| {
                let (p, q) = (verts[i], verts[(i + 1) % n]);
                point_key(Point { x: (p.x + q.x) / 2.0, y: (p.y + q.y) / 2.0 }) == point_key(first_mid)
            })
            .unwrap_or(0);
        verts.rotate_left(start);
        edge_keys.push(edges.iter().map(|e| point_key(e.1)).collect());
        centers.push(c);
        polygons.push(verts);
    }

    let mut by_edge: HashMap<(i64, i64), Vec<(usize, usize)>> = HashMap::new();
    for (c, keys) in edge_keys.iter().enumerate() {
        for (d, k) in keys.iter().enumerate() {
            by_edge.entry(*k).or_default().push((c, d));
        }
    }
    let mut neighbors: Vec<Vec<Option<CellId>>> = edge_keys.iter().map(|k| vec![None; k.len()]).collect();
    let mut back: Vec<Vec<u8>> = edge_keys.iter().map(|k| vec![NO_BACK; k.len()]).collect();
    for owners in by_edge.values() {
        match owners.as_slice() {
            [_] => {}
            &[(c1, d1), (c2, d2)] => {
                neighbors[c1][d1] = Some(CellId(c2 as u32));
                neighbors[c2][d2] = Some(CellId(c1 as u32));
                back[c1][d1] = d2 as u8;
                back[c2][d2] = d1 as u8;
            }
            _ => return Err(TopologyError::Inconsistent("edge shared by more than two cells".into())),
        }
    }
    Ok(BoardGraph { kind, neighbors, back, centers, polygons, symmetries: Vec::new() })
}

fn square_polygons(w: u32, h: u32) -> Vec<Vec<Point>> {
    let mut out = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            let (x, y) = (x as f64, y as f64);
            out.push(vec![Point { x, y }, Point { x: x + 1.0, y }, Point { x: x + 1.0, y: y + 1.0 }, Point { x, y: y + 1.0 }]);
        }
    }
    out
}

fn regular_polygon(c: Point, radius: f64, sides: usize, first_angle_deg: f64) -> Vec<Point> {
    (0..sides)
        .map(|k| {
            let t = (first_angle_deg + 360.0 * k as f64 / sides as f64).to_radians();
            Point { x: c.x + radius * t.cos(), y: c.y + radius * t.sin() }
        })
        .collect()
}

fn hex_polygons(n: u32) -> Vec<Vec<Point>> {
    let mut out = Vec::with_capacity((n * n) as usize);
    for r in 0..n {
        for q in 0..n {
            let (q, r) = (q as f64, r as f64);
            let c = Point { x: SQRT3 * (q + r / 2.0), y: 1.5 * r };
            out.push(regular_polygon(c, 1.0, 6, -90.0));
        }
    }
    out
}

fn triangle_polygons(rows: u32) -> Vec<Vec<Point>> {
    let h = SQRT3 / 2.0;
    let mut out = Vec::new();
    for i in 0..rows {
        let fi = i as f64;
        let (top, bottom) = (fi * h, (fi + 1.0) * h);
        for j in 0..=i {
            let left = -(fi + 1.0) / 2.0 + j as f64;
            out.push(vec![Point { x: left, y: bottom }, Point { x: left + 1.0, y: bottom }, Point { x: left + 0.5, y: top }]);
            if j < i {
                let tl = -fi / 2.0 + j as f64;
                out.push(vec![Point { x: tl, y: top }, Point { x: tl + 1.0, y: top }, Point { x: tl + 0.5, y: bottom }]);
            }
        }
    }
    out
}

const AXIAL_DIRS: [(i64, i64); 6] = [(1, -1), (1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1)];

fn semi3464_polygons(radius: u32) -> Vec<Vec<Point>> {
    let rad = radius as i64;
    let spacing = 1.0 + SQRT3;
    let inside = |q: i64, r: i64| q.abs().max(r.abs()).max((q + r).abs()) <= rad;
    let pos = |q: i64, r: i64| Point { x: spacing * (q as f64 + r as f64 / 2.0), y: spacing * SQRT3 / 2.0 * r as f64 };

    let mut hexes = Vec::new();
    for r in -rad..=rad {
        for q in -rad..=rad {
            if inside(q, r) {
                hexes.push((q, r));
            }
        }
    }
    let mut cells: Vec<Vec<Point>> = Vec::new();
    for &(q, r) in &hexes {
        cells.push(regular_polygon(pos(q, r), 1.0, 6, -90.0));
    }
    for &(q, r) in &hexes {
        // Squares between this hex and its E, SE, SW neighbors (each pair once).
        for &(dq, dr) in &AXIAL_DIRS[1..4] {
            let (nq, nr) = (q + dq, r + dr);
            if !inside(nq, nr) {
                continue;
            }
            let (a, b) = (pos(q, r), pos(nq, nr));
            let m = Point { x: (a.x + b.x) / 2.0, y: (a.y + b.y) / 2.0 };
            let (ux, uy) = ((b.x - a.x) / spacing * 0.5, (b.y - a.y) / spacing * 0.5);
            let (vx, vy) = (-uy, ux);
            cells.push(vec![
                Point { x: m.x + ux + vx, y: m.y + uy + vy },
                Point { x: m.x + ux - vx, y: m.y + uy - vy },
                Point { x: m.x - ux - vx, y: m.y - uy - vy },
                Point { x: m.x - ux + vx, y: m.y - uy + vy },
            ]);
        }
    }
    for &(q, r) in &hexes {
        // Triangles below this hex: between it, its SE and SW neighbors, and
        // between it, its E and SE neighbors.
        for k in 1..3 {
            let (d1, d2) = (AXIAL_DIRS[k], AXIAL_DIRS[k + 1]);
            let n1 = (q + d1.0, r + d1.1);
            let n2 = (q + d2.0, r + d2.1);
            if !inside(n1.0, n1.1) || !inside(n2.0, n2.1) {
                continue;
            }
            let pts = [pos(q, r), pos(n1.0, n1.1), pos(n2.0, n2.1)];
            let c = centroid(&pts);
            let circ = 1.0 / SQRT3;
            cells.push(
                pts.iter()
                    .map(|p| {
                        let (dx, dy) = (p.x - c.x, p.y - c.y);
                        let len = (dx * dx + dy * dy).sqrt();
                        Point { x: c.x + circ * dx / len, y: c.y + circ * dy / len }
                    })
                    .collect(),
            );
        }
    }
    // Reading order: top to bottom, then left to right.
    cells.sort_by(|a, b| {
        let (ca, cb) = (centroid(a), centroid(b));
        point_key(Point { x: ca.y, y: ca.x }).cmp(&point_key(Point { x: cb.y, y: cb.x }))
    });
    cells
}

fn symmetry_from_map(g: &BoardGraph, map: Vec<CellId>, reflected: bool, rotation: Turn) -> Result<Symmetry, TopologyError> {
    let mut offset = vec![0u8; g.cell_count()];
    for c in g.cells() {
        let m = map[c.index()];
        let a = g.sides(c) as i64;
        let (d, n) = (0..g.sides(c))
            .find_map(|d| g.neighbor(c, d).map(|n| (d, n)))
            .ok_or_else(|| TopologyError::Inconsistent(format!("isolated cell {c}")))?;
        let target = map[n.index()];
        let d2 = (0..g.sides(m))
            .find(|&e| g.neighbor(m, e) == Some(target))
            .ok_or_else(|| TopologyError::Inconsistent(format!("symmetry breaks adjacency at {c}")))?;
        let off = if reflected { d2 as i64 + d as i64 } else { d2 as i64 - d as i64 };
        offset[c.index()] = off.rem_euclid(a) as u8;
    }
    let s = Symmetry { map, offset, reflected, rotation };
    Ok(s)
}

fn square_symmetries(g: &BoardGraph, w: u32, h: u32) -> Result<Vec<Symmetry>, TopologyError> {
    let (w, h) = (w as i64, h as i64);
    let build = |f: &dyn Fn(i64, i64) -> (i64, i64)| -> Vec<CellId> {
        g.cells()
            .map(|c| {
                let (x, y) = (c.0 as i64 % w, c.0 as i64 / w);
                let (nx, ny) = f(x, y);
                CellId((ny * w + nx) as u32)
            })
            .collect()
    };
    let mut rotations: Vec<(Turn, Vec<CellId>)> =
        vec![(Turn::ZERO, build(&|x, y| (x, y))), (Turn::frac(1, 2), build(&|x, y| (w - 1 - x, h - 1 - y)))];
    if w == h {
        rotations.insert(1, (Turn::frac(1, 4), build(&|x, y| (w - 1 - y, x))));
        rotations.push((Turn::frac(3, 4), build(&|x, y| (y, h - 1 - x))));
    }
    let flip = build(&|x, y| (w - 1 - x, y));
    let mut out = Vec::new();
    for (t, m) in &rotations {
        out.push(symmetry_from_map(g, m.clone(), false, *t)?);
    }
    for (t, m) in &rotations {
        let composed: Vec<CellId> = flip.iter().map(|c| m[c.index()]).collect();
        out.push(symmetry_from_map(g, composed, true, *t)?);
    }
    Ok(out)
}

fn hex_symmetries(g: &BoardGraph, n: u32) -> Result<Vec<Symmetry>, TopologyError> {
    let n = n as i64;
    let build = |f: &dyn Fn(i64, i64) -> (i64, i64)| -> Vec<CellId> {
        g.cells()
            .map(|c| {
                let (q, r) = (c.0 as i64 % n, c.0 as i64 / n);
                let (nq, nr) = f(q, r);
                CellId((nr * n + nq) as u32)
            })
            .collect()
    };
    let id = build(&|q, r| (q, r));
    let rot = build(&|q, r| (n - 1 - q, n - 1 - r));
    let swap = build(&|q, r| (r, q));
    let rot_swap: Vec<CellId> = swap.iter().map(|c| rot[c.index()]).collect();
    Ok(vec![
        symmetry_from_map(g, id, false, Turn::ZERO)?,
        symmetry_from_map(g, rot, false, Turn::frac(1, 2))?,
        symmetry_from_map(g, swap, true, Turn::ZERO)?,
        symmetry_from_map(g, rot_swap, true, Turn::frac(1, 2))?,
    ])
}
