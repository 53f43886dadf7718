use serde::{Deserialize, Serialize};

use crate::error::CodeError;
use crate::params::{CodeParams, Scheme};

/// The levels of all `n` cells. This is the only persistent memory of a code.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellState {
    levels: Vec<u8>,
}

impl CellState {
    pub fn zeros(n: usize) -> Self {
        CellState { levels: vec![0; n] }
    }

    pub fn from_levels(levels: Vec<u8>) -> Self {
        CellState { levels }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    pub fn levels_mut(&mut self) -> &mut [u8] {
        &mut self.levels
    }

    pub fn into_levels(self) -> Vec<u8> {
        self.levels
    }

    pub fn total_weight(&self) -> u64 {
        self.levels.iter().map(|&l| u64::from(l)).sum()
    }

    /// True if every cell of `self` is at least the matching cell of `other`.
    pub fn dominates(&self, other: &CellState) -> bool {
        self.levels.len() == other.levels.len() && self.levels.iter().zip(&other.levels).all(|(a, b)| a >= b)
    }

    /// Checks the cell count and that every level lies in `0..q`.
    pub fn validate(&self, params: &CodeParams) -> Result<(), CodeError> {
        if self.levels.len() != params.n {
            return Err(CodeError::LengthMismatch { got: self.levels.len(), expected: params.n });
        }
        if let Some(pos) = self.levels.iter().position(|&l| usize::from(l) >= params.q) {
            return Err(CodeError::CorruptedState(format!(
                "cell {pos} at level {} exceeds q - 1 = {}",
                self.levels[pos],
                params.q - 1
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockRole {
    Parity,
    Index,
    Tally,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockStatus {
    Empty,
    Active,
    Full,
}

impl BlockStatus {
    pub fn is_live(self) -> bool {
        self != BlockStatus::Full
    }
}

/// A window of consecutive cells inside a [`CellState`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockView {
    pub offset: usize,
    pub len: usize,
    pub role: BlockRole,
}

impl BlockView {
    pub fn new(offset: usize, len: usize, role: BlockRole) -> Self {
        BlockView { offset, len, role }
    }

    pub fn end(&self) -> usize {
        self.offset + self.len
    }

    pub fn cells<'a>(&self, state: &'a CellState) -> &'a [u8] {
        &state.levels[self.offset..self.end()]
    }

    pub fn cells_mut<'a>(&self, state: &'a mut CellState) -> &'a mut [u8] {
        &mut state.levels[self.offset..self.end()]
    }

    pub fn weight(&self, state: &CellState) -> u64 {
        weight(self.cells(state))
    }

    pub fn parity(&self, state: &CellState) -> u8 {
        parity(self.cells(state))
    }

    pub fn status(&self, state: &CellState, q: usize) -> BlockStatus {
        block_status(self.cells(state), q)
    }

    pub fn overlaps(&self, other: &BlockView) -> bool {
        self.offset < other.end() && other.offset < self.end()
    }
}

pub fn weight(cells: &[u8]) -> u64 {
    cells.iter().map(|&l| u64::from(l)).sum()
}

pub fn parity(cells: &[u8]) -> u8 {
    (weight(cells) % 2) as u8
}

pub fn block_status(cells: &[u8], q: usize) -> BlockStatus {
    let top = (q - 1) as u8;
    if cells.iter().all(|&l| l == 0) {
        BlockStatus::Empty
    } else if cells.iter().all(|&l| l == top) {
        BlockStatus::Full
    } else {
        BlockStatus::Active
    }
}

/// The `k` logical information bits, each 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InfoVector {
    bits: Vec<u8>,
}

impl InfoVector {
    pub fn zeros(k: usize) -> Self {
        InfoVector { bits: vec![0; k] }
    }

    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        InfoVector { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: u8) {
        self.bits[i] = value & 1;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] ^= 1;
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Drops padding bits beyond the logical `k`.
    pub fn truncated(mut self, k: usize) -> Self {
        self.bits.truncate(k);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EncodeOutcome {
    Next(CellState),
    Erase,
}

impl EncodeOutcome {
    pub fn is_erase(&self) -> bool {
        matches!(self, EncodeOutcome::Erase)
    }

    pub fn into_state(self) -> Option<CellState> {
        match self {
            EncodeOutcome::Next(state) => Some(state),
            EncodeOutcome::Erase => None,
        }
    }
}

/// JSON interchange form of a cell state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRecord {
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub scheme: Scheme,
    pub cells: Vec<u8>,
}

impl StateRecord {
    pub fn new(params: &CodeParams, state: &CellState) -> Self {
        StateRecord { n: params.n, k: params.k, q: params.q, scheme: params.scheme, cells: state.levels.clone() }
    }

    /// Splits a record back into validated parameters and state.
    pub fn into_parts(self) -> Result<(CodeParams, CellState), CodeError> {
        let params = CodeParams::new(self.n, self.k, self.q, self.scheme)?;
        let state = CellState::from_levels(self.cells);
        state.validate(&params)?;
        Ok((params, state))
    }
}
