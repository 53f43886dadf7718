//! The index-less code: one information bit per block of `k` cells.
//!
//! The bit value is the parity of its block. Which bit a block represents is
//! encoded in the order its cells are raised: a block for bit `i` first fills
//! cell `i` to `q-1`, then cell `i+1`, and so on cyclically. While the block
//! is not full, the single cyclic run of zero cells (or the single cell still
//! below `q-1`) identifies where writing started.

use crate::analysis::bounds::bound_indexless;
use crate::cell::{block_status, parity, weight, BlockStatus, BlockView, CellState, EncodeOutcome, InfoVector};
use crate::codec::FlashCode;
use crate::error::CodeError;
use crate::layout::Layout;
use crate::params::CodeParams;

/// Start and length of the single cyclic run of zeros, or `None` if the
/// block has no zero cell.
fn zero_run(cells: &[u8]) -> Result<Option<(usize, usize)>, CodeError> {
    let len = cells.len();
    let zeros = cells.iter().filter(|&&l| l == 0).count();
    if zeros == 0 {
        return Ok(None);
    }
    if zeros == len {
        return Err(CodeError::CorruptedState("block is empty".into()));
    }
    let mut starts = (0..len).filter(|&p| cells[p] == 0 && cells[(p + len - 1) % len] != 0);
    let start = starts.next().expect("a partial block has a run start");
    if starts.next().is_some() {
        return Err(CodeError::CorruptedState(format!("zero cells of block {cells:?} are not cyclically contiguous")));
    }
    Ok(Some((start, zeros)))
}

/// The only cell below `q-1` in a block without zeros.
fn single_open_cell(cells: &[u8], q: usize) -> Result<usize, CodeError> {
    let top = (q - 1) as u8;
    let mut open = (0..cells.len()).filter(|&p| cells[p] < top);
    match (open.next(), open.next()) {
        (Some(p), None) => Ok(p),
        (None, _) => Err(CodeError::FullBlock),
        (Some(_), Some(_)) => {
            Err(CodeError::CorruptedState(format!("block {cells:?} has no zeros but several cells below q - 1")))
        }
    }
}

/// The bit index carried by an active block.
pub fn read_index(cells: &[u8], q: usize) -> Result<usize, CodeError> {
    let len = cells.len();
    match zero_run(cells)? {
        Some((start, run)) => Ok((start + run) % len),
        None => match single_open_cell(cells, q) {
            Ok(p) => Ok((p + 1) % len),
            Err(CodeError::FullBlock) => Err(CodeError::CorruptedState("block is full".into())),
            Err(e) => Err(e),
        },
    }
}

/// Raises the next cell in the block's writing order by one level.
pub fn advance(cells: &mut [u8], q: usize) -> Result<(), CodeError> {
    let len = cells.len();
    let top = (q - 1) as u8;
    if block_status(cells, q) == BlockStatus::Full {
        return Err(CodeError::FullBlock);
    }
    match zero_run(cells)? {
        Some((start, _)) => {
            let prev = (start + len - 1) % len;
            if cells[prev] < top {
                cells[prev] += 1;
            } else {
                cells[start] = 1;
            }
        }
        None => cells[single_open_cell(cells, q)?] += 1,
    }
    Ok(())
}

/// Starts an empty block for bit `bit`.
pub fn open_block(bit: usize, cells: &mut [u8]) -> Result<(), CodeError> {
    if cells.iter().any(|&l| l != 0) {
        return Err(CodeError::NotEmpty);
    }
    cells[bit] = 1;
    Ok(())
}

/// Decodes `k_eff` bits from the given stage-0 blocks.
pub fn decode_blocks(blocks: &[BlockView], k_eff: usize, q: usize, state: &CellState) -> Result<InfoVector, CodeError> {
    let mut bits = InfoVector::zeros(k_eff);
    for block in blocks {
        let cells = block.cells(state);
        if block_status(cells, q) == BlockStatus::Active {
            bits.set(read_index(cells, q)?, parity(cells));
        }
    }
    Ok(bits)
}

/// Flips bit `bit` using the stage-0 blocks: advance the active block for
/// the bit, else open the first empty block, else erase.
pub fn encode_blocks(
    blocks: &[BlockView],
    q: usize,
    bit: usize,
    state: &CellState,
) -> Result<EncodeOutcome, CodeError> {
    let mut first_empty = None;
    for block in blocks {
        let cells = block.cells(state);
        match block_status(cells, q) {
            BlockStatus::Active if read_index(cells, q)? == bit => {
                let mut next = state.clone();
                advance(block.cells_mut(&mut next), q)?;
                return Ok(EncodeOutcome::Next(next));
            }
            BlockStatus::Empty if first_empty.is_none() => first_empty = Some(block),
            _ => {}
        }
    }
    match first_empty {
        Some(block) => {
            let mut next = state.clone();
            open_block(bit, block.cells_mut(&mut next))?;
            Ok(EncodeOutcome::Next(next))
        }
        None => Ok(EncodeOutcome::Erase),
    }
}

/// Free levels of the active block holding each bit.
pub fn block_allocations(
    blocks: &[BlockView],
    k_eff: usize,
    q: usize,
    state: &CellState,
) -> Result<Vec<Option<u64>>, CodeError> {
    let mut out = vec![None; k_eff];
    for block in blocks {
        let cells = block.cells(state);
        if block_status(cells, q) == BlockStatus::Active {
            let capacity = (cells.len() * (q - 1)) as u64;
            out[read_index(cells, q)?] = Some(capacity - weight(cells));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct IndexlessCode {
    params: CodeParams,
    layout: Layout,
}

impl IndexlessCode {
    pub fn new(params: CodeParams) -> Result<Self, CodeError> {
        let layout = Layout::new(&params)?;
        Ok(IndexlessCode { params, layout })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }
}

impl FlashCode for IndexlessCode {
    fn params(&self) -> &CodeParams {
        &self.params
    }

    fn encode(&self, bit: usize, state: &CellState) -> Result<EncodeOutcome, CodeError> {
        self.check_bit(bit)?;
        state.validate(&self.params)?;
        encode_blocks(&self.layout.parity, self.params.q, bit, state)
    }

    fn decode(&self, state: &CellState) -> Result<InfoVector, CodeError> {
        state.validate(&self.params)?;
        let bits = decode_blocks(&self.layout.parity, self.params.k_eff(), self.params.q, state)?;
        Ok(bits.truncated(self.params.k))
    }

    fn capacity_bound(&self) -> u64 {
        bound_indexless(self.params.k_eff() as u64, self.params.q as u64)
    }

    fn stage(&self, _state: &CellState) -> Result<usize, CodeError> {
        Ok(0)
    }

    fn allocations(&self, state: &CellState) -> Result<Vec<Option<u64>>, CodeError> {
        let mut out = block_allocations(&self.layout.parity, self.params.k_eff(), self.params.q, state)?;
        out.truncate(self.params.k);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Scheme;

    /// The four cell-writing orders for k = 4, q = 3, one per bit.
    #[rustfmt::skip]
    pub(crate) const WRITING_ORDERS: [[[u8; 4]; 9]; 4] = [
        [
            [0, 0, 0, 0], [1, 0, 0, 0], [2, 0, 0, 0], [2, 1, 0, 0], [2, 2, 0, 0],
            [2, 2, 1, 0], [2, 2, 2, 0], [2, 2, 2, 1], [2, 2, 2, 2],
        ],
        [
            [0, 0, 0, 0], [0, 1, 0, 0], [0, 2, 0, 0], [0, 2, 1, 0], [0, 2, 2, 0],
            [0, 2, 2, 1], [0, 2, 2, 2], [1, 2, 2, 2], [2, 2, 2, 2],
        ],
        [
            [0, 0, 0, 0], [0, 0, 1, 0], [0, 0, 2, 0], [0, 0, 2, 1], [0, 0, 2, 2],
            [1, 0, 2, 2], [2, 0, 2, 2], [2, 1, 2, 2], [2, 2, 2, 2],
        ],
        [
            [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 2], [1, 0, 0, 2], [2, 0, 0, 2],
            [2, 1, 0, 2], [2, 2, 0, 2], [2, 2, 1, 2], [2, 2, 2, 2],
        ],
    ];

    #[test]
    fn writing_orders_reproduced() {
        for (bit, order) in WRITING_ORDERS.iter().enumerate() {
            let mut cells = [0u8; 4];
            open_block(bit, &mut cells).unwrap();
            assert_eq!(cells, order[1]);
            for step in order.iter().skip(2) {
                assert_eq!(read_index(&cells, 3).unwrap(), bit);
                advance(&mut cells, 3).unwrap();
                assert_eq!(&cells, step);
            }
        }
    }

    #[test]
    fn read_index_examples() {
        assert_eq!(read_index(&[2, 1, 0, 0], 3).unwrap(), 0);
        assert_eq!(read_index(&[0, 2, 2, 1], 3).unwrap(), 1);
        assert_eq!(read_index(&[1, 0, 2, 2], 3).unwrap(), 2);
        assert_eq!(read_index(&[2, 2, 2, 1], 3).unwrap(), 0);
    }

    #[test]
    fn read_index_rejects_malformed() {
        assert!(matches!(read_index(&[0, 0, 0, 0], 3), Err(CodeError::CorruptedState(_))));
        assert!(matches!(read_index(&[2, 2, 2, 2], 3), Err(CodeError::CorruptedState(_))));
        assert!(matches!(read_index(&[1, 0, 1, 0], 3), Err(CodeError::CorruptedState(_))));
        assert!(matches!(read_index(&[1, 1, 2, 2], 3), Err(CodeError::CorruptedState(_))));
    }

    #[test]
    fn advance_examples() {
        let cases: [([u8; 4], [u8; 4]); 3] =
            [([2, 2, 0, 0], [2, 2, 1, 0]), ([0, 2, 2, 2], [1, 2, 2, 2]), ([2, 2, 2, 1], [2, 2, 2, 2])];
        for (before, after) in cases {
            let mut cells = before;
            advance(&mut cells, 3).unwrap();
            assert_eq!(cells, after);
        }
        let mut full = [2u8; 4];
        assert_eq!(advance(&mut full, 3), Err(CodeError::FullBlock));
        let mut empty = [0u8; 4];
        assert!(matches!(advance(&mut empty, 3), Err(CodeError::CorruptedState(_))));
    }

    #[test]
    fn open_block_examples() {
        let mut cells = [0u8; 4];
        open_block(1, &mut cells).unwrap();
        assert_eq!(cells, [0, 1, 0, 0]);
        let mut cells = [0u8; 4];
        open_block(3, &mut cells).unwrap();
        assert_eq!(cells, [0, 0, 0, 1]);
        let mut cells = [0u8; 4];
        open_block(0, &mut cells).unwrap();
        assert_eq!(cells, [1, 0, 0, 0]);
        assert_eq!(read_index(&cells, 3).unwrap(), 0);
        assert_eq!(parity(&cells), 1);
        assert_eq!(open_block(0, &mut cells), Err(CodeError::NotEmpty));
    }

    #[test]
    fn single_cell_blocks() {
        let mut cells = [0u8];
        open_block(0, &mut cells).unwrap();
        assert_eq!(read_index(&cells, 5).unwrap(), 0);
        advance(&mut cells, 5).unwrap();
        assert_eq!(cells, [2]);
    }

    fn codec(n: usize, k: usize, q: usize) -> IndexlessCode {
        IndexlessCode::new(CodeParams::new(n, k, q, Scheme::Indexless).unwrap()).unwrap()
    }

    #[test]
    fn decode_examples() {
        let c = codec(16, 4, 3);
        assert_eq!(c.decode(&c.init()).unwrap().bits(), &[0, 0, 0, 0]);
        let mut levels = vec![0u8; 16];
        levels[..4].copy_from_slice(&[2, 1, 0, 0]);
        assert_eq!(c.decode(&CellState::from_levels(levels)).unwrap().bits(), &[1, 0, 0, 0]);
        let mut levels = vec![0u8; 16];
        levels[..4].copy_from_slice(&[0, 1, 0, 0]);
        assert_eq!(c.decode(&CellState::from_levels(levels)).unwrap().bits(), &[0, 1, 0, 0]);
    }

    #[test]
    fn encode_examples() {
        let c = codec(16, 4, 3);
        let next = c.encode(2, &c.init()).unwrap().into_state().unwrap();
        assert_eq!(&next.levels()[..4], &[0, 0, 1, 0]);
        assert!(next.levels()[4..].iter().all(|&l| l == 0));

        let mut levels = vec![0u8; 16];
        levels[..8].copy_from_slice(&[2, 2, 2, 2, 0, 1, 0, 0]);
        let next = c.encode(1, &CellState::from_levels(levels)).unwrap().into_state().unwrap();
        assert_eq!(&next.levels()[..8], &[2, 2, 2, 2, 0, 2, 0, 0]);

        let c = codec(4, 2, 2);
        let state = CellState::from_levels(vec![1, 1, 0, 1]);
        assert_eq!(c.encode(0, &state).unwrap(), EncodeOutcome::Erase);
        assert!(c.encode(2, &state).is_err());
    }

    #[test]
    fn padded_bit_hidden() {
        let c = codec(16, 3, 2);
        assert_eq!(c.params().k_eff(), 4);
        let mut state = c.init();
        for bit in [2, 2, 0, 1, 2] {
            state = c.encode(bit, &state).unwrap().into_state().unwrap();
        }
        assert_eq!(c.decode(&state).unwrap().bits(), &[1, 1, 1]);
        assert!(c.encode(3, &state).is_err());
    }
}
