//! SVG pictures of features placed on a board.
//!
//! Each feature is drawn at its instance nearest the board centre, seen from
//! player 1: white disks are friendly pieces, black disks enemy pieces,
//! white dots empty cells. The action cell carries a green `+` for positive
//! weights and a red `−` for negative ones; the anchor cell is shaded and the
//! opponent's last move, for reactive features, is ringed with dots.

use std::fmt::Write;

use thiserror::Error;

use crate::dsl::{ElementKind, Feature, FeatureSet};
use crate::game::GameRules;
use crate::instance::{instantiate, FeatureInstance, InstanceError};
use crate::topology::{BoardGraph, CellId, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("feature {0} has no placement on this board")]
    NoPlacement(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

const SCALE: f64 = 28.0;
const MARGIN: f64 = 24.0;
const CAPTION: f64 = 34.0;

struct Frame {
    min_x: f64,
    min_y: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn of(board: &BoardGraph) -> Self {
        let pts = board.cells().flat_map(|c| board.polygon(c).iter().copied());
        let (mut lx, mut ly, mut hx, mut hy) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in pts {
            lx = lx.min(p.x);
            ly = ly.min(p.y);
            hx = hx.max(p.x);
            hy = hy.max(p.y);
        }
        Frame {
            min_x: lx,
            min_y: ly,
            width: (hx - lx) * SCALE + 2.0 * MARGIN,
            height: (hy - ly) * SCALE + 2.0 * MARGIN + CAPTION,
        }
    }

    fn at(&self, p: Point) -> (f64, f64) {
        ((p.x - self.min_x) * SCALE + MARGIN, (p.y - self.min_y) * SCALE + MARGIN)
    }
}

fn centroid(board: &BoardGraph) -> Point {
    let n = board.cell_count() as f64;
    let (sx, sy) = board.cells().map(|c| board.center(c)).fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    Point { x: sx / n, y: sy / n }
}

/// The instance drawn for a feature: anchor nearest the centre, then the
/// unreflected, lowest start direction.
fn representative<'a>(board: &BoardGraph, instances: impl Iterator<Item = &'a FeatureInstance>) -> Option<&'a FeatureInstance> {
    let mid = centroid(board);
    let dist = |c: CellId| {
        let p = board.center(c);
        // Rounded so that ties between symmetric anchors are exact.
        (((p.x - mid.x).powi(2) + (p.y - mid.y).powi(2)) * 1e6).round() as i64
    };
    instances.min_by_key(|i| (dist(i.anchor), i.reflected, i.start_dir, i.anchor))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders feature `index` of `fs` on the rules' board.
pub fn render_feature(rules: &dyn GameRules, fs: &FeatureSet, index: usize) -> Result<String, RenderError> {
    let board = rules.board();
    let feature = &fs.features[index];
    let single = FeatureSet::new(fs.name.clone(), vec![feature.clone()]);
    let idx = instantiate(&single, board, rules.pieces(), 1)?;
    let inst = representative(board, idx.iter()).ok_or(RenderError::NoPlacement(index))?;
    Ok(draw(board, feature, inst))
}

/// Renders every feature, named `<set>-<nn>.svg`.
pub fn render_feature_set(rules: &dyn GameRules, fs: &FeatureSet) -> Result<Vec<(String, String)>, RenderError> {
    let stem = if fs.name.is_empty() { "feature" } else { fs.name.as_str() };
    (0..fs.features.len()).map(|i| Ok((format!("{stem}-{i:02}.svg"), render_feature(rules, fs, i)?))).collect()
}

fn draw(board: &BoardGraph, feature: &Feature, inst: &FeatureInstance) -> String {
    let caption = escape(&feature.to_string());
    let mut fr = Frame::of(board);
    // Monospace glyphs at font size 10 are about 6 units wide.
    fr.width = fr.width.max(caption.chars().count() as f64 * 6.1 + 2.0 * MARGIN);
    let r = 0.36 * SCALE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.2}" height="{:.2}" viewBox="0 0 {:.2} {:.2}">"#,
        fr.width, fr.height, fr.width, fr.height
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);

    for c in board.cells() {
        let fill = if c == inst.anchor { "#f3d27a" } else { "#d9c7a3" };
        let pts: Vec<String> = board.polygon(c).iter().map(|&p| fr.at(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(s, r##"<polygon points="{}" fill="{fill}" stroke="#7a6a50" stroke-width="1"/>"##, pts.join(" "));
    }

    // Links between adjacent element sites show the pattern's shape.
    let sites: Vec<CellId> = inst.element_sites.iter().flatten().copied().collect();
    for (i, &a) in sites.iter().enumerate() {
        for &b in &sites[i + 1..] {
            if board.are_adjacent(a, b) {
                let ((x1, y1), (x2, y2)) = (fr.at(board.center(a)), fr.at(board.center(b)));
                let _ = writeln!(
                    s,
                    r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#5a4a30" stroke-width="2"/>"##
                );
            }
        }
    }

    for (el, site) in feature.pattern.iter().zip(&inst.element_sites) {
        let Some(c) = site else { continue };
        let (x, y) = fr.at(board.center(*c));
        match el.positive() {
            Some(ElementKind::Friend) => {
                let _ = writeln!(
                    s,
                    r##"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="#ffffff" stroke="#000000" stroke-width="1.5"/>"##
                );
            }
            Some(ElementKind::Enemy | ElementKind::Player(_) | ElementKind::Item(_)) => {
                let _ = writeln!(
                    s,
                    r##"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="#000000" stroke="#000000" stroke-width="1.5"/>"##
                );
            }
            Some(ElementKind::Empty) => {
                let _ = writeln!(
                    s,
                    r##"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="#ffffff" stroke="#555555" stroke-width="1"/>"##,
                    r * 0.3
                );
            }
            Some(ElementKind::Off) | None => {}
        }
        let labels: Vec<String> = el
            .constraints
            .iter()
            .filter(|c| c.negated || matches!(c.kind, ElementKind::Player(_) | ElementKind::Item(_)))
            .map(|c| c.to_string())
            .collect();
        if !labels.is_empty() {
            let _ = writeln!(
                s,
                r##"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="9" text-anchor="middle" fill="#b00000">{}</text>"##,
                y - r - 2.0,
                escape(&labels.join(","))
            );
        }
    }

    if let Some(last) = inst.last_move {
        let (x, y) = fr.at(board.center(last));
        let _ = writeln!(
            s,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="none" stroke="#1060c0" stroke-width="2" stroke-dasharray="2,3"/>"##,
            r + 4.0
        );
    }

    if let Some(from) = inst.action_from {
        let ((x1, y1), (x2, y2)) = (fr.at(board.center(from)), fr.at(board.center(inst.action_to)));
        let _ = writeln!(
            s,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#208020" stroke-width="3" stroke-dasharray="6,3"/>"##
        );
    }
    let (x, y) = fr.at(board.center(inst.action_to));
    let arm = 0.3 * SCALE;
    let colour = if feature.weight >= 0.0 { "#20a020" } else { "#d02020" };
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{colour}" stroke-width="4"/>"##,
        x - arm,
        x + arm
    );
    if feature.weight >= 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{colour}" stroke-width="4"/>"##,
            y - arm,
            y + arm
        );
    }

    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="10" fill="#000000">{}</text>"##,
        MARGIN,
        fr.height - CAPTION / 2.0,
        caption
    );
    s.push_str("</svg>\n");
    s
}
