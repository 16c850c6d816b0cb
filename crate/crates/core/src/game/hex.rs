use crate::game::{GameError, GameKind, GameRules, GameState, Move, PieceTable, Placement, PlayerId, Status};
use crate::topology::{BoardGraph, CellId, TilingKind};

/// Hex on an `n x n` rhombus. Player 1 joins the top and bottom rows,
/// player 2 the left and right columns. No swap rule.
#[derive(Debug, Clone)]
pub struct HexRules {
    size: u32,
    name: String,
    inner: Placement,
}

impl HexRules {
    pub fn new(size: u32) -> Result<Self, GameError> {
        if size < 2 {
            return Err(GameError::InvalidParameters(format!("hex board size {size} < 2")));
        }
        Ok(HexRules { size, name: format!("hex{size}"), inner: Placement::new(TilingKind::HexRhombus { size })? })
    }

    /// Which of the player's two goal edges the cell touches, as bits.
    fn edges(&self, c: CellId, player: PlayerId) -> u8 {
        let n = self.size;
        let (q, r) = (c.0 % n, c.0 / n);
        let coord = if player == 1 { r } else { q };
        (coord == 0) as u8 | (((coord == n - 1) as u8) << 1)
    }

    /// Flood-fills the player's group through `start`; returns the edge bits
    /// it touches.
    fn group_edges(&self, state: &GameState, start: CellId, player: PlayerId, seen: &mut [bool], stack: &mut Vec<CellId>) -> u8 {
        let board = self.board();
        let mut edges = 0;
        stack.clear();
        stack.push(start);
        seen[start.index()] = true;
        while let Some(c) = stack.pop() {
            edges |= self.edges(c, player);
            for n in board.neighbors(c).iter().flatten() {
                if !seen[n.index()] && state.board.get(*n) == player as u32 {
                    seen[n.index()] = true;
                    stack.push(*n);
                }
            }
        }
        edges
    }

    fn connected(&self, state: &GameState, player: PlayerId) -> bool {
        let board = self.board();
        let mut seen = vec![false; board.cell_count()];
        let mut stack = Vec::new();
        board
            .cells()
            .filter(|&c| self.edges(c, player) & 1 != 0 && state.board.get(c) == player as u32)
            .any(|c| !seen[c.index()] && self.group_edges(state, c, player, &mut seen, &mut stack) == 3)
    }
}

impl GameRules for HexRules {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> GameKind {
        GameKind::Hex { size: self.size }
    }

    fn board(&self) -> &BoardGraph {
        &self.inner.board
    }

    fn pieces(&self) -> &PieceTable {
        &self.inner.pieces
    }

    fn initial_state(&self) -> GameState {
        self.inner.initial_state()
    }

    fn legal_moves_into(&self, state: &GameState, out: &mut Vec<Move>) {
        self.inner.legal_moves_into(state, out);
    }

    fn is_legal(&self, state: &GameState, mv: Move) -> bool {
        self.inner.is_legal(state, mv)
    }

    fn apply_in_place(&self, state: &mut GameState, mv: Move) {
        self.inner.apply_in_place(state, mv);
    }

    fn status(&self, state: &GameState) -> Status {
        for p in 1..=2 {
            if self.connected(state, p) {
                return Status::Win(p);
            }
        }
        Status::Ongoing
    }

    fn status_after_move(&self, state: &GameState) -> Status {
        let Some(mv) = state.last_move else { return Status::Ongoing };
        let player = state.board.get(mv.to) as PlayerId;
        let mut seen = vec![false; self.board().cell_count()];
        if self.group_edges(state, mv.to, player, &mut seen, &mut Vec::new()) == 3 {
            Status::Win(player)
        } else {
            Status::Ongoing
        }
    }

    fn settles_when_full(&self) -> bool {
        true
    }
}
