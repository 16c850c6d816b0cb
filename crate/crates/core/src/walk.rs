//! Walks: sequences of fractional clockwise turns, each followed by one step
//! through the cell adjacency graph.
//!
//! A walk is resolved from an anchor cell and a starting direction. Every
//! step first turns the current facing by the step's fraction of the current
//! cell's side count, then moves to the neighbor behind that edge. After
//! entering a cell, "forwards" is the edge opposite the entry edge. Cells
//! with an odd number of sides have no opposite edge, so the branch splits
//! into the two edges either side of it. A turn that lands exactly halfway
//! between two edges (a quarter turn in a hexagon) also splits.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::topology::{BoardGraph, CellId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("turn denominator must be non-zero")]
    ZeroDenominator,
    #[error("malformed turn `{0}`")]
    BadTurn(String),
    #[error("malformed walk `{0}`")]
    BadWalk(String),
    #[error("start direction {dir} out of range for cell {cell} with {sides} sides")]
    DirectionOutOfRange { cell: CellId, dir: usize, sides: usize },
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A clockwise-positive fraction of a full turn, kept in lowest terms with
/// magnitude strictly below one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Turn {
    num: i32,
    den: u32,
}

impl Turn {
    pub const ZERO: Turn = Turn { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self, WalkError> {
        if den == 0 {
            return Err(WalkError::ZeroDenominator);
        }
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        // Whole turns are no-ops; `%` keeps the sign of the numerator.
        num %= den;
        if num == 0 {
            return Ok(Turn::ZERO);
        }
        let g = gcd(num, den);
        num /= g;
        den /= g;
        Ok(Turn { num: num as i32, den: den as u32 })
    }

    /// `k/n` of a full turn; panics only if `n == 0`.
    pub fn frac(k: i64, n: i64) -> Self {
        Turn::new(k, n).expect("non-zero denominator")
    }

    pub fn numerator(self) -> i64 {
        self.num as i64
    }

    pub fn denominator(self) -> i64 {
        self.den as i64
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn negated(self) -> Self {
        Turn { num: -self.num, den: self.den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for Turn {
    fn default() -> Self {
        Turn::ZERO
    }
}

impl PartialOrd for Turn {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Turn {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.numerator() * other.denominator()).cmp(&(other.numerator() * self.denominator()))
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Turn {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WalkError::BadTurn(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let digits = |p: &str| -> Result<i64, WalkError> {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) || p.len() > 9 {
                return Err(bad());
            }
            p.parse::<i64>().map_err(|_| bad())
        };
        let (n, d) = match body.split_once('/') {
            Some((n, d)) => (digits(n)?, digits(d)?),
            None => (digits(body)?, 1),
        };
        if d == 0 {
            return Err(WalkError::ZeroDenominator);
        }
        Turn::new(if neg { -n } else { n }, d)
    }
}

/// Number of edge-steps a turn covers in a cell with `sides` sides, rounded
/// to the nearest integer with halves going away from zero. The result is
/// meant to be read modulo `sides`.
pub fn round_turn(turn: Turn, sides: usize) -> i64 {
    let a = sides as i64;
    let n = turn.numerator();
    let d = turn.denominator();
    let mag = (2 * n.abs() * a + d) / (2 * d);
    if n < 0 {
        -mag
    } else {
        mag
    }
}

/// Every edge-step count a turn may resolve to in a cell with `sides` sides:
/// one value normally, both neighbors when the turn falls exactly halfway.
pub fn turn_choices(turn: Turn, sides: usize) -> TurnChoices {
    let a = sides as i64;
    let scaled = turn.numerator() * a;
    let d = turn.denominator();
    if scaled % d != 0 && (2 * scaled) % d == 0 {
        let lo = scaled.div_euclid(d);
        TurnChoices { first: lo, second: Some(lo + 1) }
    } else {
        TurnChoices { first: round_turn(turn, sides), second: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TurnChoices {
    pub first: i64,
    pub second: Option<i64>,
}

impl TurnChoices {
    pub fn iter(self) -> impl Iterator<Item = i64> {
        std::iter::once(self.first).chain(self.second)
    }
}

/// An ordered list of turns; the empty walk denotes the anchor itself.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Walk(pub Vec<Turn>);

impl Walk {
    pub fn new(steps: Vec<Turn>) -> Self {
        Walk(steps)
    }

    pub fn empty() -> Self {
        Walk(Vec::new())
    }

    pub fn steps(&self) -> &[Turn] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Mirror image: every turn negated.
    pub fn mirrored(&self) -> Walk {
        Walk(self.0.iter().map(|t| t.negated()).collect())
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}

impl FromStr for Walk {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = t.strip_prefix('{').and_then(|r| r.strip_suffix('}')).ok_or_else(|| WalkError::BadWalk(s.to_string()))?;
        if inner.trim().is_empty() {
            return Ok(Walk::empty());
        }
        inner.split(',').map(Turn::from_str).collect::<Result<Vec<_>, _>>().map(Walk)
    }
}

/// One terminal location reached by a walk. `location` is `None` when the
/// branch stepped off the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedSite {
    pub location: Option<CellId>,
    pub multiplicity: u32,
}

/// Resolves `walk` from `anchor` facing `start_dir`, returning every terminal
/// site once, sorted with the off-board site (if any) first.
pub fn resolve_walk(board: &BoardGraph, anchor: CellId, start_dir: usize, walk: &Walk) -> Result<Vec<ResolvedSite>, WalkError> {
    let mut sites: BTreeMap<Option<CellId>, u32> = BTreeMap::new();
    for_each_branch(board, anchor, start_dir, walk, |loc| *sites.entry(loc).or_default() += 1)?;
    Ok(sites.into_iter().map(|(location, multiplicity)| ResolvedSite { location, multiplicity }).collect())
}

/// Calls `visit` with the terminal of every branch of the walk, in
/// depth-first order.
pub fn for_each_branch(
    board: &BoardGraph,
    anchor: CellId,
    start_dir: usize,
    walk: &Walk,
    mut visit: impl FnMut(Option<CellId>),
) -> Result<(), WalkError> {
    let sides = board.sides(anchor);
    if start_dir >= sides {
        return Err(WalkError::DirectionOutOfRange { cell: anchor, dir: start_dir, sides });
    }
    let steps = walk.steps();
    let mut stack = vec![(anchor, start_dir, 0usize)];
    while let Some((cell, facing, i)) = stack.pop() {
        if i == steps.len() {
            visit(Some(cell));
            continue;
        }
        let a = board.sides(cell);
        // Reverse so that the first choice is explored first.
        let choices: Vec<i64> = turn_choices(steps[i], a).iter().collect();
        for t in choices.into_iter().rev() {
            let dir = (facing as i64 + t).rem_euclid(a as i64) as usize;
            let Some(next) = board.neighbor(cell, dir) else {
                visit(None);
                continue;
            };
            if i + 1 == steps.len() {
                // Entering an odd-sided cell still splits the facing, so the
                // final site is reached by two branches.
                visit(Some(next));
                if board.sides(next) % 2 == 1 {
                    visit(Some(next));
                }
                continue;
            }
            let back = board.back_index_unchecked(cell, dir);
            let an = board.sides(next);
            if an.is_multiple_of(2) {
                stack.push((next, (back + an / 2) % an, i + 1));
            } else {
                stack.push((next, (back + an.div_ceil(2)) % an, i + 1));
                stack.push((next, (back + (an - 1) / 2) % an, i + 1));
            }
        }
    }
    Ok(())
}
