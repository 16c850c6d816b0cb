use crate::game::{GameError, GameKind, GameRules, GameState, Move, PieceTable, Placement, PlayerId, Status};
use crate::topology::{BoardGraph, CellId, TilingKind};

const LINE_DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

/// Four in a row (orthogonal or diagonal) on a `w x h` square board; a full
/// board without a line is a draw.
#[derive(Debug, Clone)]
pub struct Line4Rules {
    width: u32,
    height: u32,
    name: String,
    inner: Placement,
}

impl Line4Rules {
    pub fn new(width: u32, height: u32) -> Result<Self, GameError> {
        if width < 4 || height < 4 {
            return Err(GameError::InvalidParameters(format!("line4 board {width}x{height} is smaller than 4x4")));
        }
        Ok(Line4Rules {
            width,
            height,
            name: format!("line4-{width}x{height}"),
            inner: Placement::new(TilingKind::Square { width, height })?,
        })
    }

    fn at(&self, state: &GameState, x: i64, y: i64) -> Option<u32> {
        self.board().square_cell(x, y).map(|c| state.board.get(c))
    }

    fn run_through(&self, state: &GameState, c: CellId, player: u32, (dx, dy): (i64, i64)) -> usize {
        let (x, y) = ((c.0 % self.width) as i64, (c.0 / self.width) as i64);
        let mut len = 1;
        for sign in [1, -1] {
            let mut k = 1;
            while self.at(state, x + sign * k * dx, y + sign * k * dy) == Some(player) {
                len += 1;
                k += 1;
            }
        }
        len
    }

    fn line_at(&self, state: &GameState, c: CellId) -> bool {
        let p = state.board.get(c);
        p != 0 && LINE_DIRS.iter().any(|&d| self.run_through(state, c, p, d) >= 4)
    }
}

impl GameRules for Line4Rules {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> GameKind {
        GameKind::Line4 { width: self.width, height: self.height }
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
        if let Some(c) = self.board().cells().find(|&c| self.line_at(state, c)) {
            return Status::Win(state.board.get(c) as PlayerId);
        }
        if self.board().cells().all(|c| state.board.get(c) != 0) {
            Status::Draw
        } else {
            Status::Ongoing
        }
    }

    fn status_after_move(&self, state: &GameState) -> Status {
        let Some(mv) = state.last_move else { return Status::Ongoing };
        if self.line_at(state, mv.to) {
            Status::Win(state.board.get(mv.to) as PlayerId)
        } else if state.move_number as usize >= self.board().cell_count() {
            Status::Draw
        } else {
            Status::Ongoing
        }
    }
}
