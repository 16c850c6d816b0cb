//! Pre-generation of feature instances.
//!
//! Every feature is expanded over anchors, rotations, reflections and walk
//! ambiguity branches once per player perspective. Each surviving candidate
//! is compiled into a board-sized mask/target pair (sites pinned to a single
//! chunk value) plus per-cell negative tests (sites that exclude some values),
//! so matching costs a few word operations regardless of the pattern size.

use std::collections::HashMap;

use thiserror::Error;

use crate::chunkset::{required_bits, ChunkSet};
use crate::dsl::{ElementKind, Feature, FeatureSet, Mode, Rotations, Scope};
use crate::game::{PieceTable, PlayerId};
use crate::topology::{BoardGraph, CellId};
use crate::walk::{for_each_branch, round_turn, Walk, WalkError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("feature {feature}: player P{player} out of range (game has {players} players)")]
    PlayerOutOfRange { feature: usize, player: u32, players: u8 },
    #[error("feature {feature}: item I{item} out of range (game has {items} items)")]
    ItemOutOfRange { feature: usize, item: u32, items: usize },
    #[error("feature {feature}: absolute pattern symmetries requested on a board without symmetry maps")]
    NoSymmetries { feature: usize },
    #[error("feature {feature}: absolute anchor {cell} is not on the board")]
    AnchorOutOfRange { feature: usize, cell: CellId },
    #[error(transparent)]
    Walk(#[from] WalkError),
}

/// A fully resolved and compiled placement of one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureInstance {
    /// Index of the source feature in its feature set.
    pub feature: usize,
    pub anchor: CellId,
    pub start_dir: usize,
    pub reflected: bool,
    pub mask: ChunkSet,
    pub target: ChunkSet,
    /// `(cell, value)`: the instance fails if the cell holds `value`.
    pub negatives: Vec<(CellId, u32)>,
    pub action_to: CellId,
    pub action_from: Option<CellId>,
    pub last_move: Option<CellId>,
    pub weight: f64,
    /// Resolved site of each pattern element (`None` = off-board).
    pub element_sites: Vec<Option<CellId>>,
}

impl FeatureInstance {
    #[inline]
    pub fn matches(&self, state: &ChunkSet) -> bool {
        state.matches_unchecked(&self.mask, &self.target) && !self.negatives.iter().any(|&(c, v)| state.violates(c, v))
    }
}

pub fn match_instance(inst: &FeatureInstance, state: &ChunkSet) -> bool {
    inst.matches(state)
}

/// All instances of a feature set for one mover.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceIndex {
    pub mover: PlayerId,
    pub proactive: Vec<FeatureInstance>,
    /// Reactive instances keyed by the cell of the opponent's last move.
    pub reactive: Vec<Vec<FeatureInstance>>,
}

impl InstanceIndex {
    pub fn reactive_for(&self, cell: CellId) -> &[FeatureInstance] {
        &self.reactive[cell.index()]
    }

    pub fn reactive_len(&self) -> usize {
        self.reactive.iter().map(Vec::len).sum()
    }

    pub fn len(&self) -> usize {
        self.proactive.len() + self.reactive_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &FeatureInstance> {
        self.proactive.iter().chain(self.reactive.iter().flatten())
    }
}

/// One [`InstanceIndex`] per player, built once per game.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureIndex {
    per_player: Vec<InstanceIndex>,
}

impl FeatureIndex {
    pub fn build(fs: &FeatureSet, board: &BoardGraph, pieces: &PieceTable) -> Result<Self, InstanceError> {
        let per_player = (1..=pieces.player_count()).map(|p| instantiate(fs, board, pieces, p)).collect::<Result<Vec<_>, _>>()?;
        Ok(FeatureIndex { per_player })
    }

    pub fn for_player(&self, p: PlayerId) -> &InstanceIndex {
        &self.per_player[p as usize - 1]
    }
}

/// Bit set over chunk values `0..=items`.
type ValueSet = u64;

fn kind_values(kind: ElementKind, pieces: &PieceTable, mover: PlayerId, feature: usize) -> Result<ValueSet, InstanceError> {
    let items = pieces.item_count();
    let owned_by = |pred: &dyn Fn(PlayerId) -> bool| -> ValueSet {
        (1..=items).filter(|&i| pred(pieces.owner(i as u32))).fold(0, |acc, i| acc | 1 << i)
    };
    Ok(match kind {
        ElementKind::Off => unreachable!("off-board constraints are checked before compiling"),
        ElementKind::Empty => 1,
        ElementKind::Friend => owned_by(&|o| o == mover),
        ElementKind::Enemy => owned_by(&|o| o != mover),
        ElementKind::Player(n) => {
            if n > pieces.player_count() as u32 {
                return Err(InstanceError::PlayerOutOfRange { feature, player: n, players: pieces.player_count() });
            }
            owned_by(&|o| o as u32 == n)
        }
        ElementKind::Item(n) => {
            if n as usize > items {
                return Err(InstanceError::ItemOutOfRange { feature, item: n, items });
            }
            1 << n
        }
    })
}

struct Compiler<'a> {
    board: &'a BoardGraph,
    pieces: &'a PieceTable,
    mover: PlayerId,
    chunk_bits: u32,
    all_values: ValueSet,
}

impl Compiler<'_> {
    fn sites(&self, anchor: CellId, dir: usize, walk: &Walk, reflected: bool) -> Result<Vec<Option<CellId>>, WalkError> {
        let walk = if reflected { walk.mirrored() } else { walk.clone() };
        let mut out = Vec::new();
        for_each_branch(self.board, anchor, dir, &walk, |loc| {
            if !out.contains(&loc) {
                out.push(loc);
            }
        })?;
        Ok(out)
    }

    /// Compiles every ambiguity-branch combination of one (anchor,
    /// direction, reflection) candidate.
    fn candidate(
        &self,
        fi: usize,
        f: &Feature,
        anchor: CellId,
        dir: usize,
        reflected: bool,
        out: &mut Vec<FeatureInstance>,
    ) -> Result<(), InstanceError> {
        let mut walk_sites: Vec<Vec<Option<CellId>>> = Vec::new();
        for el in &f.pattern {
            walk_sites.push(self.sites(anchor, dir, &el.walk, reflected)?);
        }
        let n_el = f.pattern.len();
        walk_sites.push(self.sites(anchor, dir, &f.action.to, reflected)?);
        if let Some(w) = &f.action.from {
            walk_sites.push(self.sites(anchor, dir, w, reflected)?);
        }
        if let Some(w) = &f.last_move {
            walk_sites.push(self.sites(anchor, dir, w, reflected)?);
        }

        // Odometer over the branch choices of each walk.
        let mut pick = vec![0usize; walk_sites.len()];
        loop {
            let chosen: Vec<Option<CellId>> = pick.iter().zip(&walk_sites).map(|(&i, s)| s[i]).collect();
            if let Some(inst) = self.compile(fi, f, anchor, dir, reflected, &chosen, n_el)? {
                out.push(inst);
            }
            let mut k = 0;
            while k < pick.len() {
                pick[k] += 1;
                if pick[k] < walk_sites[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
            if k == pick.len() {
                return Ok(());
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn compile(
        &self,
        fi: usize,
        f: &Feature,
        anchor: CellId,
        dir: usize,
        reflected: bool,
        chosen: &[Option<CellId>],
        n_el: usize,
    ) -> Result<Option<FeatureInstance>, InstanceError> {
        let mut allowed: Vec<(CellId, ValueSet)> = Vec::new();
        for (el, site) in f.pattern.iter().zip(&chosen[..n_el]) {
            let off = el.requires_off_board();
            match (off, site) {
                (true, None) => continue,
                (true, Some(_)) | (false, None) => return Ok(None),
                (false, Some(cell)) => {
                    let mut set = self.all_values;
                    for c in &el.constraints {
                        if c.kind == ElementKind::Off {
                            // `!-` only requires the site to be on the board.
                            continue;
                        }
                        let v = kind_values(c.kind, self.pieces, self.mover, fi)?;
                        set &= if c.negated { !v } else { v };
                    }
                    match allowed.iter_mut().find(|(c, _)| c == cell) {
                        Some((_, s)) => *s &= set,
                        None => allowed.push((*cell, set)),
                    }
                }
            }
        }
        let mut rest = chosen[n_el..].iter();
        let Some(&Some(to)) = rest.next() else { return Ok(None) };
        let from = match &f.action.from {
            Some(_) => match rest.next() {
                Some(&Some(c)) => Some(c),
                _ => return Ok(None),
            },
            None => None,
        };
        let last = match f.mode {
            Mode::Reactive => match rest.next() {
                Some(&Some(c)) => Some(c),
                _ => return Ok(None),
            },
            Mode::Proactive => None,
        };

        let cells = self.board.cell_count();
        let mut mask = ChunkSet::new(cells, self.chunk_bits).expect("valid width");
        let mut target = mask.clone();
        let full = ((1u64 << self.chunk_bits) - 1) as u32;
        let mut negatives = Vec::new();
        allowed.sort_by_key(|(c, _)| *c);
        for (cell, set) in allowed {
            if set == 0 {
                return Ok(None);
            }
            if set.count_ones() == 1 {
                mask.set_unchecked(cell, full);
                target.set_unchecked(cell, set.trailing_zeros());
            } else {
                let excluded = self.all_values & !set;
                for v in 0..64 {
                    if excluded & (1 << v) != 0 {
                        negatives.push((cell, v));
                    }
                }
            }
        }
        Ok(Some(FeatureInstance {
            feature: fi,
            anchor,
            start_dir: dir,
            reflected,
            mask,
            target,
            negatives,
            action_to: to,
            action_from: from,
            last_move: last,
            weight: f.weight,
            element_sites: chosen[..n_el].to_vec(),
        }))
    }
}

/// Expands and compiles `fs` on `board` from the point of view of `mover`.
pub fn instantiate(
    fs: &FeatureSet,
    board: &BoardGraph,
    pieces: &PieceTable,
    mover: PlayerId,
) -> Result<InstanceIndex, InstanceError> {
    let items = pieces.item_count();
    assert!(items < 64, "at most 63 item kinds are supported");
    let comp =
        Compiler { board, pieces, mover, chunk_bits: required_bits(pieces.state_count()), all_values: (1u64 << (items + 1)) - 1 };

    let mut raw = Vec::new();
    for (fi, f) in fs.features.iter().enumerate() {
        let refls: &[bool] = if f.reflections { &[false, true] } else { &[false] };
        match f.scope {
            Scope::Relative => {
                for anchor in board.cells() {
                    let sides = board.sides(anchor);
                    let mut dirs: Vec<usize> = match &f.rotations {
                        Rotations::All => (0..sides).collect(),
                        Rotations::Explicit(turns) => {
                            turns.iter().map(|&t| round_turn(t, sides).rem_euclid(sides as i64) as usize).collect()
                        }
                    };
                    dirs.sort_unstable();
                    dirs.dedup();
                    for &refl in refls {
                        for &d in &dirs {
                            comp.candidate(fi, f, anchor, d, refl, &mut raw)?;
                        }
                    }
                }
            }
            Scope::Absolute(anchor) => {
                if anchor.index() >= board.cell_count() {
                    return Err(InstanceError::AnchorOutOfRange { feature: fi, cell: anchor });
                }
                let identity_only = !f.reflections && f.rotations == Rotations::Explicit(vec![crate::walk::Turn::ZERO]);
                if identity_only {
                    comp.candidate(fi, f, anchor, 0, false, &mut raw)?;
                    continue;
                }
                if board.symmetries().is_empty() {
                    return Err(InstanceError::NoSymmetries { feature: fi });
                }
                for s in board.symmetries() {
                    if s.reflected && !f.reflections {
                        continue;
                    }
                    if let Rotations::Explicit(turns) = &f.rotations {
                        if !turns.contains(&s.rotation) {
                            continue;
                        }
                    }
                    comp.candidate(fi, f, s.map_cell(anchor), s.map_dir(board, anchor, 0), s.reflected, &mut raw)?;
                }
            }
        }
    }

    // Merge instances with identical tests and actions, summing weights.
    type Key = (Vec<u64>, Vec<u64>, Vec<(CellId, u32)>, CellId, Option<CellId>, Option<CellId>);
    let mut seen: HashMap<Key, usize> = HashMap::new();
    let mut merged: Vec<FeatureInstance> = Vec::new();
    for inst in raw {
        let mut neg = inst.negatives.clone();
        neg.sort_unstable();
        let key =
            (inst.mask.words().to_vec(), inst.target.words().to_vec(), neg, inst.action_to, inst.action_from, inst.last_move);
        match seen.get(&key) {
            Some(&i) => merged[i].weight += inst.weight,
            None => {
                seen.insert(key, merged.len());
                merged.push(inst);
            }
        }
    }

    let mut proactive = Vec::new();
    let mut reactive = vec![Vec::new(); board.cell_count()];
    for inst in merged {
        match inst.last_move {
            Some(c) => reactive[c.index()].push(inst),
            None => proactive.push(inst),
        }
    }
    Ok(InstanceIndex { mover, proactive, reactive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_feature;
    use crate::topology::TilingKind;

    fn set(lines: &[&str]) -> FeatureSet {
        FeatureSet::new("t", lines.iter().map(|l| parse_feature(l).unwrap()).collect())
    }

    #[test]
    fn knight_star_on_square() {
        let g = BoardGraph::build(TilingKind::Square { width: 8, height: 8 }).unwrap();
        let fs = set(&["rel proactive rot=all refl=yes el={}:. act_to={0,0,1/4}"]);
        let idx = instantiate(&fs, &g, &PieceTable::two_player(), 1).unwrap();
        let anchor = g.square_cell(3, 4).unwrap();
        let mut dest: Vec<CellId> = idx.proactive.iter().filter(|i| i.anchor == anchor).map(|i| i.action_to).collect();
        dest.sort();
        let mut expect: Vec<CellId> = [(1, 2), (2, 1), (-1, 2), (-2, 1), (1, -2), (2, -1), (-1, -2), (-2, -1)]
            .iter()
            .filter_map(|&(dx, dy)| g.square_cell(3 + dx, 4 + dy))
            .collect();
        expect.sort();
        assert_eq!(dest, expect);
    }

    #[test]
    fn off_board_element_restricts_anchors() {
        let g = BoardGraph::build(TilingKind::Square { width: 5, height: 5 }).unwrap();
        let fs = set(&["rel proactive rot={0} refl=no el={0}:- el={}:. act_to={}"]);
        let idx = instantiate(&fs, &g, &PieceTable::two_player(), 1).unwrap();
        let anchors: Vec<CellId> = idx.proactive.iter().map(|i| i.anchor).collect();
        assert_eq!(anchors, (0..5).map(CellId).collect::<Vec<_>>());
    }

    #[test]
    fn friend_and_enemy_follow_perspective() {
        let g = BoardGraph::build(TilingKind::Square { width: 3, height: 1 }).unwrap();
        let fs = set(&["abs=0 proactive el={1/4}:o act_to={}"]);
        let p = PieceTable::two_player();
        let one = instantiate(&fs, &g, &p, 1).unwrap();
        let two = instantiate(&fs, &g, &p, 2).unwrap();
        assert_eq!(one.proactive[0].target.get(CellId(1)), 1);
        assert_eq!(two.proactive[0].target.get(CellId(1)), 2);
    }

    #[test]
    fn negated_item_compiles_to_negative_test() {
        // Three items: 1 -> player 1, 2 and 3 -> player 2.
        let pieces = PieceTable::new(2, vec![1, 2, 2]);
        let g = BoardGraph::build(TilingKind::Square { width: 3, height: 1 }).unwrap();
        let fs = set(&["abs=0 proactive el={1/4}:x,!I3 el={1/4,0}:x act_to={}"]);
        let idx = instantiate(&fs, &g, &pieces, 1).unwrap();
        let inst = &idx.proactive[0];
        // `x,!I3` leaves only item 2: pinned by the mask.
        assert_eq!(inst.target.get(CellId(1)), 2);
        // Plain `x` allows items 2 and 3: excluded values become negative tests.
        assert_eq!(inst.negatives, vec![(CellId(2), 0), (CellId(2), 1)]);
        let mut s = ChunkSet::for_states(3, 4);
        s.set(CellId(1), 2).unwrap();
        s.set(CellId(2), 3).unwrap();
        assert!(inst.matches(&s));
        s.set(CellId(1), 3).unwrap();
        assert!(!inst.matches(&s));
    }

    #[test]
    fn out_of_range_indices() {
        let g = BoardGraph::build(TilingKind::Square { width: 3, height: 3 }).unwrap();
        let p = PieceTable::two_player();
        assert!(matches!(
            instantiate(&set(&["rel proactive el={0}:P3 act_to={}"]), &g, &p, 1),
            Err(InstanceError::PlayerOutOfRange { player: 3, .. })
        ));
        assert!(matches!(
            instantiate(&set(&["rel proactive el={0}:I5 act_to={}"]), &g, &p, 1),
            Err(InstanceError::ItemOutOfRange { item: 5, .. })
        ));
    }

    #[test]
    fn absolute_symmetry_needs_maps() {
        let g = BoardGraph::build(TilingKind::Semi3464 { radius: 1 }).unwrap();
        let p = PieceTable::two_player();
        assert!(matches!(
            instantiate(&set(&["abs=0 proactive rot=all el={}:. act_to={}"]), &g, &p, 1),
            Err(InstanceError::NoSymmetries { .. })
        ));
        assert!(instantiate(&set(&["abs=0 proactive el={}:. act_to={}"]), &g, &p, 1).is_ok());
    }

    #[test]
    fn absolute_symmetry_expansion_on_square() {
        let g = BoardGraph::build(TilingKind::Square { width: 4, height: 4 }).unwrap();
        let p = PieceTable::two_player();
        let idx = instantiate(&set(&["abs=0 proactive rot=all refl=yes el={}:. act_to={}"]), &g, &p, 1).unwrap();
        let mut anchors: Vec<u32> = idx.proactive.iter().map(|i| i.anchor.0).collect();
        anchors.sort();
        assert_eq!(anchors, vec![0, 3, 12, 15]);
        // Each corner is reached by one rotation and one reflection.
        assert!(idx.proactive.iter().all(|i| i.weight == 2.0));
    }

    #[test]
    fn action_from_resolves() {
        let g = BoardGraph::build(TilingKind::Square { width: 5, height: 5 }).unwrap();
        let fs = set(&["rel proactive rot={0} refl=no el={}:o el={0}:. act_from={} act_to={0}"]);
        let idx = instantiate(&fs, &g, &PieceTable::two_player(), 1).unwrap();
        for inst in &idx.proactive {
            assert_eq!(inst.action_from, Some(inst.anchor));
            assert_eq!(g.neighbor(inst.anchor, 0), Some(inst.action_to));
        }
        assert_eq!(idx.proactive.len(), 20);
    }

    #[test]
    fn reactive_instances_are_keyed_by_last_move() {
        let g = BoardGraph::build(TilingKind::HexRhombus { size: 5 }).unwrap();
        let fs = set(&["rel reactive w=5 last={0} el={0}:x el={1/6}:o el={-1/6}:o el={}:. act_to={}"]);
        let idx = instantiate(&fs, &g, &PieceTable::two_player(), 1).unwrap();
        assert!(idx.proactive.is_empty());
        for c in g.cells() {
            for inst in idx.reactive_for(c) {
                assert_eq!(inst.last_move, Some(c));
                // The bridge is mirror-symmetric, so reflections merge.
                assert_eq!(inst.weight, 10.0);
            }
        }
        let centre = g.hex_cell(2, 2).unwrap();
        assert_eq!(idx.reactive_for(centre).len(), 6);
    }

    #[test]
    fn deterministic() {
        let g = BoardGraph::build(TilingKind::Semi3464 { radius: 2 }).unwrap();
        let fs = set(&["rel proactive el={}:. el={0,0}:o act_to={0,0,1/4}"]);
        let p = PieceTable::two_player();
        assert_eq!(instantiate(&fs, &g, &p, 1).unwrap(), instantiate(&fs, &g, &p, 1).unwrap());
    }
}
