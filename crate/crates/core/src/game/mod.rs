//! A small general-game interface and the two built-in placement games.

mod hex;
mod line4;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::chunkset::ChunkSet;
use crate::topology::{BoardGraph, CellId, TilingKind};

pub use hex::HexRules;
pub use line4::Line4Rules;

/// 1-based player number.
pub type PlayerId = u8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("illegal move {0}")]
    IllegalMove(Move),
    #[error("invalid game parameters: {0}")]
    InvalidParameters(String),
    #[error("game is already over")]
    GameOver,
    #[error("unknown game `{0}` (expected hexN or line4-WxH)")]
    UnknownGame(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub to: CellId,
    pub from: Option<CellId>,
}

impl Move {
    pub fn place(to: CellId) -> Self {
        Move { to, from: None }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.from {
            Some(from) => write!(f, "{from}->{}", self.to),
            None => write!(f, "@{}", self.to),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ongoing,
    Win(PlayerId),
    Draw,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        self != Status::Ongoing
    }

    /// Reward for `player`: 1 for a win, 0.5 for a draw, 0 otherwise.
    pub fn score_for(self, player: PlayerId) -> f64 {
        match self {
            Status::Win(p) if p == player => 1.0,
            Status::Draw => 0.5,
            _ => 0.0,
        }
    }
}

/// Item kinds and their owners. Chunk value `i` (1-based) holds item `i`;
/// value 0 is an empty cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceTable {
    players: u8,
    owners: Vec<PlayerId>,
}

impl PieceTable {
    pub fn new(players: u8, owners: Vec<PlayerId>) -> Self {
        PieceTable { players, owners }
    }

    /// One piece type per player; item `p` belongs to player `p`.
    pub fn two_player() -> Self {
        PieceTable::new(2, vec![1, 2])
    }

    pub fn player_count(&self) -> u8 {
        self.players
    }

    pub fn item_count(&self) -> usize {
        self.owners.len()
    }

    pub fn owner(&self, item: u32) -> PlayerId {
        self.owners[item as usize - 1]
    }

    pub fn state_count(&self) -> u32 {
        self.owners.len() as u32 + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    pub board: ChunkSet,
    pub mover: PlayerId,
    pub last_move: Option<Move>,
    pub move_number: u32,
}

/// Which built-in game a rules object implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    Hex { size: u32 },
    Line4 { width: u32, height: u32 },
}

pub trait GameRules: Send + Sync {
    fn name(&self) -> &str;
    fn kind(&self) -> GameKind;
    fn board(&self) -> &BoardGraph;
    fn pieces(&self) -> &PieceTable;
    fn initial_state(&self) -> GameState;
    /// Moves available to the mover. Callers check [`GameRules::status`]
    /// first; the list is not emptied for finished games.
    fn legal_moves_into(&self, state: &GameState, out: &mut Vec<Move>);
    fn is_legal(&self, state: &GameState, mv: Move) -> bool;
    /// Applies a move known to be legal.
    fn apply_in_place(&self, state: &mut GameState, mv: Move);
    /// Full status evaluation of an arbitrary state.
    fn status(&self, state: &GameState) -> Status;

    /// Status of a state whose predecessor was ongoing; may look only at the
    /// last move.
    fn status_after_move(&self, state: &GameState) -> Status {
        self.status(state)
    }

    /// Whether the winner of a game never changes once decided and can be
    /// read off the full board. Playouts may then skip per-ply checks.
    fn settles_when_full(&self) -> bool {
        false
    }

    fn player_count(&self) -> u8 {
        self.pieces().player_count()
    }

    fn board_kind(&self) -> TilingKind {
        self.board().kind()
    }

    fn legal_moves(&self, state: &GameState) -> Vec<Move> {
        let mut out = Vec::new();
        self.legal_moves_into(state, &mut out);
        out
    }

    fn apply(&self, state: &GameState, mv: Move) -> Result<GameState, GameError> {
        if self.status(state).is_terminal() {
            return Err(GameError::GameOver);
        }
        if !self.is_legal(state, mv) {
            return Err(GameError::IllegalMove(mv));
        }
        let mut next = state.clone();
        self.apply_in_place(&mut next, mv);
        Ok(next)
    }
}

/// Shared machinery for games where a move places the mover's piece on an
/// empty cell.
#[derive(Debug, Clone)]
pub(crate) struct Placement {
    pub board: Arc<BoardGraph>,
    pub pieces: PieceTable,
}

impl Placement {
    pub fn new(kind: TilingKind) -> Result<Self, GameError> {
        let board = BoardGraph::build(kind).map_err(|e| GameError::InvalidParameters(e.to_string()))?;
        Ok(Placement { board: Arc::new(board), pieces: PieceTable::two_player() })
    }

    pub fn initial_state(&self) -> GameState {
        GameState {
            board: ChunkSet::for_states(self.board.cell_count(), self.pieces.state_count()),
            mover: 1,
            last_move: None,
            move_number: 0,
        }
    }

    pub fn legal_moves_into(&self, state: &GameState, out: &mut Vec<Move>) {
        out.clear();
        out.extend(self.board.cells().filter(|&c| state.board.get(c) == 0).map(Move::place));
    }

    pub fn is_legal(&self, state: &GameState, mv: Move) -> bool {
        mv.from.is_none() && mv.to.index() < self.board.cell_count() && state.board.get(mv.to) == 0
    }

    pub fn apply_in_place(&self, state: &mut GameState, mv: Move) {
        state.board.set_unchecked(mv.to, state.mover as u32);
        state.mover = 3 - state.mover;
        state.last_move = Some(mv);
        state.move_number += 1;
    }
}

/// Looks up a game by registry name: `hex7`, `hexN`, `line4-WxH`.
pub fn game_by_name(name: &str) -> Result<Arc<dyn GameRules>, GameError> {
    let unknown = || GameError::UnknownGame(name.to_string());
    if let Some(n) = name.strip_prefix("hex") {
        let n: u32 = n.parse().map_err(|_| unknown())?;
        return Ok(Arc::new(HexRules::new(n)?));
    }
    if let Some(dims) = name.strip_prefix("line4-") {
        let (w, h) = dims.split_once('x').ok_or_else(unknown)?;
        let w: u32 = w.parse().map_err(|_| unknown())?;
        let h: u32 = h.parse().map_err(|_| unknown())?;
        return Ok(Arc::new(Line4Rules::new(w, h)?));
    }
    Err(unknown())
}
