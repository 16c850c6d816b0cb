//! Fixed-width bit-packed per-cell state.
//!
//! Each cell owns a chunk of `B` bits where `B` is a power of two, so a chunk
//! never straddles two 64-bit words. Matching a compiled pattern against a
//! state is one AND and one compare per word, however many cells the pattern
//! covers.

use thiserror::Error;

use crate::topology::CellId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChunkError {
    #[error("chunk width {0} is not a power of two in 1..=32")]
    BadWidth(u32),
    #[error("value {value} does not fit in {bits} bits")]
    ValueOutOfRange { value: u32, bits: u32 },
    #[error("cell {cell} out of range for {cells} cells")]
    CellOutOfRange { cell: CellId, cells: usize },
    #[error("chunk sets differ in shape")]
    ShapeMismatch,
}

const WORD_BITS: u32 = u64::BITS;

/// Smallest power-of-two chunk width able to hold `state_count` distinct
/// per-cell values (value 0 being the empty cell).
pub fn required_bits(state_count: u32) -> u32 {
    let mut b = 1;
    while b < 32 && (1u64 << b) < state_count as u64 {
        b *= 2;
    }
    b
}

#[cfg(debug_assertions)]
thread_local! {
    static WORD_TESTS: std::cell::Cell<u64> = const { std::cell::Cell::new(0) };
}

/// Number of word-level AND+CMP pairs executed on this thread by
/// [`ChunkSet::matches`] (debug builds only).
#[cfg(debug_assertions)]
pub fn word_tests() -> u64 {
    WORD_TESTS.with(|c| c.get())
}

#[cfg(debug_assertions)]
pub fn reset_word_tests() {
    WORD_TESTS.with(|c| c.set(0));
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChunkSet {
    chunk_bits: u32,
    cells: usize,
    words: Vec<u64>,
}

impl ChunkSet {
    pub fn new(cells: usize, chunk_bits: u32) -> Result<Self, ChunkError> {
        if !chunk_bits.is_power_of_two() || chunk_bits > 32 {
            return Err(ChunkError::BadWidth(chunk_bits));
        }
        let words = (cells * chunk_bits as usize).div_ceil(WORD_BITS as usize);
        Ok(ChunkSet { chunk_bits, cells, words: vec![0; words] })
    }

    pub fn for_states(cells: usize, state_count: u32) -> Self {
        ChunkSet::new(cells, required_bits(state_count)).expect("required_bits yields a valid width")
    }

    pub fn chunk_bits(&self) -> u32 {
        self.chunk_bits
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn same_shape(&self, other: &ChunkSet) -> bool {
        self.chunk_bits == other.chunk_bits && self.cells == other.cells
    }

    #[inline]
    fn locate(&self, cell: CellId) -> (usize, u32) {
        let bit = cell.index() * self.chunk_bits as usize;
        (bit / WORD_BITS as usize, (bit % WORD_BITS as usize) as u32)
    }

    #[inline]
    fn chunk_mask(&self) -> u64 {
        (1u64 << self.chunk_bits) - 1
    }

    #[inline]
    pub fn get(&self, cell: CellId) -> u32 {
        let (w, s) = self.locate(cell);
        ((self.words[w] >> s) & self.chunk_mask()) as u32
    }

    pub fn set(&mut self, cell: CellId, value: u32) -> Result<(), ChunkError> {
        if cell.index() >= self.cells {
            return Err(ChunkError::CellOutOfRange { cell, cells: self.cells });
        }
        if value as u64 > self.chunk_mask() {
            return Err(ChunkError::ValueOutOfRange { value, bits: self.chunk_bits });
        }
        self.set_unchecked(cell, value);
        Ok(())
    }

    #[inline]
    pub(crate) fn set_unchecked(&mut self, cell: CellId, value: u32) {
        let (w, s) = self.locate(cell);
        let m = self.chunk_mask() << s;
        self.words[w] = (self.words[w] & !m) | (((value as u64) << s) & m);
    }

    /// `true` iff `state AND mask == target` on every word, with `self` as
    /// the state.
    pub fn matches(&self, mask: &ChunkSet, target: &ChunkSet) -> Result<bool, ChunkError> {
        if !self.same_shape(mask) || !self.same_shape(target) {
            return Err(ChunkError::ShapeMismatch);
        }
        Ok(self.matches_unchecked(mask, target))
    }

    #[inline]
    pub(crate) fn matches_unchecked(&self, mask: &ChunkSet, target: &ChunkSet) -> bool {
        let mut diff = 0u64;
        for ((s, m), t) in self.words.iter().zip(&mask.words).zip(&target.words) {
            diff |= (s & m) ^ t;
        }
        #[cfg(debug_assertions)]
        WORD_TESTS.with(|c| c.set(c.get() + self.words.len() as u64));
        diff == 0
    }

    /// `true` iff the chunk at `cell` holds exactly `forbidden`.
    #[inline]
    pub fn violates(&self, cell: CellId, forbidden: u32) -> bool {
        self.get(cell) == forbidden
    }

    pub fn count_nonzero(&self) -> usize {
        (0..self.cells as u32).filter(|&c| self.get(CellId(c)) != 0).count()
    }
}
