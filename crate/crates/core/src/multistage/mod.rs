//! The recursive multi-stage code.
//!
//! Stage 0 is the index-less code over `m` blocks of `k` cells. When it can
//! no longer absorb a write, the parity region is re-read as `2m` blocks of
//! `k/2` cells, the live ones are paired with a batch of index blocks, and the
//! current information vector is re-recorded in the first `k` of them. This
//! repeats through `s = log2 k` stages, halving the parity blocks each time.
//!
//! Two index layouts are supported: one batch of base-`q` index blocks per
//! stage, or binary index blocks stacked `q - 1` stages deep in the same cells
//! with a small tally region counting transitions.

mod index;

pub use index::{IndexBlockValue, IndexCoding, IndexVariant};

use crate::analysis::bounds::bound_for;
use crate::cell::{weight, BlockRole, BlockStatus, BlockView, CellState, EncodeOutcome, InfoVector};
use crate::codec::FlashCode;
use crate::error::CodeError;
use crate::indexless::{block_allocations, decode_blocks, encode_blocks};
use crate::layout::Layout;
use crate::params::{CodeParams, Scheme};

/// Geometry of the parity blocks at stage `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageContext {
    pub stage: usize,
    pub block_len: usize,
    pub block_count: usize,
}

/// A live parity block and the index block paired with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair {
    pub parity: BlockView,
    pub index: BlockView,
    pub value: IndexBlockValue,
}

/// Raises the lowest cell still below `q-1`.
fn increment(cells: &mut [u8], q: usize) -> Result<(), CodeError> {
    let top = (q - 1) as u8;
    let cell = cells.iter_mut().find(|l| **l < top).ok_or(CodeError::FullBlock)?;
    *cell += 1;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct MultistageCode {
    params: CodeParams,
    layout: Layout,
    variant: IndexVariant,
}

impl MultistageCode {
    pub fn new(params: CodeParams) -> Result<Self, CodeError> {
        let variant = match params.scheme {
            Scheme::MultistageBaseQ => IndexVariant::BaseQ,
            Scheme::MultistageStacked => IndexVariant::Stacked,
            other => return Err(CodeError::InvalidParams(format!("{other} is not a multi-stage scheme"))),
        };
        let layout = Layout::new(&params)?;
        Ok(MultistageCode { params, layout, variant })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn variant(&self) -> IndexVariant {
        self.variant
    }

    pub fn stage_count(&self) -> usize {
        self.params.stage_count()
    }

    pub fn stage_context(&self, r: usize) -> StageContext {
        StageContext { stage: r, block_len: self.params.k_eff() >> r, block_count: self.layout.block_count() << r }
    }

    fn stage_blocks(&self, r: usize) -> impl Iterator<Item = BlockView> {
        let ctx = self.stage_context(r);
        let start = self.layout.parity_region().start;
        (0..ctx.block_count).map(move |j| BlockView::new(start + j * ctx.block_len, ctx.block_len, BlockRole::Parity))
    }

    pub fn coding(&self, r: usize) -> IndexCoding {
        let width = match self.variant {
            IndexVariant::BaseQ => self.params.mu(),
            IndexVariant::Stacked => self.params.mu_binary(),
        };
        IndexCoding::for_stage(self.variant, r, self.params.q, width, self.params.k_eff())
    }

    /// Index blocks used by stage `r >= 1`.
    pub fn batch(&self, r: usize) -> &[BlockView] {
        let group = match self.variant {
            IndexVariant::BaseQ => r - 1,
            IndexVariant::Stacked => (r - 1) / (self.params.q - 1),
        };
        &self.layout.index[group]
    }

    pub fn read_index_block(&self, u: &BlockView, r: usize, state: &CellState) -> Result<IndexBlockValue, CodeError> {
        self.coding(r).read(u.cells(state))
    }

    pub fn write_index_block(
        &self,
        u: &BlockView,
        value: IndexBlockValue,
        r: usize,
        state: &mut CellState,
    ) -> Result<(), CodeError> {
        self.coding(r).write(u.cells_mut(state), value)
    }

    /// The stage a reachable state is in.
    ///
    /// Base-`q`: the last batch holding a nonzero cell (every transition
    /// writes `bit(0)` into its batch). Stacked: the level sum of the tally.
    pub fn current_stage(&self, state: &CellState) -> Result<usize, CodeError> {
        let r = match self.variant {
            IndexVariant::BaseQ => self
                .layout
                .index
                .iter()
                .rposition(|batch| batch.iter().any(|u| u.cells(state).iter().any(|&l| l != 0)))
                .map_or(0, |g| g + 1),
            IndexVariant::Stacked => self.layout.tally.map_or(0, |t| t.weight(state) as usize),
        };
        if r >= self.stage_count().max(1) {
            return Err(CodeError::CorruptedState(format!("stage {r} out of range")));
        }
        Ok(r)
    }

    /// Live parity blocks of stage `r` paired, in order, with the index
    /// blocks of its batch that are not full.
    pub fn pairs(&self, r: usize, state: &CellState) -> Result<Vec<Pair>, CodeError> {
        let coding = self.coding(r);
        let q = self.params.q;
        let mut index = self.batch(r).iter();
        let mut pairs = Vec::new();
        for block in self.stage_blocks(r) {
            if block.status(state, q) == BlockStatus::Full {
                continue;
            }
            let (u, value) = loop {
                let u = index.next().ok_or_else(|| {
                    CodeError::CorruptedState(format!("stage {r}: more live parity blocks than index blocks"))
                })?;
                match coding.read(u.cells(state))? {
                    IndexBlockValue::Full => continue,
                    value => break (*u, value),
                }
            };
            pairs.push(Pair { parity: block, index: u, value });
        }
        for u in index {
            if coding.read(u.cells(state))? != IndexBlockValue::Full {
                return Err(CodeError::CorruptedState(format!(
                    "stage {r}: more live index blocks than live parity blocks"
                )));
            }
        }
        Ok(pairs)
    }

    /// Decodes `k_eff` bits at stage `r`.
    pub fn decode_stage(&self, r: usize, state: &CellState) -> Result<InfoVector, CodeError> {
        if r == 0 {
            return decode_blocks(&self.layout.parity, self.params.k_eff(), self.params.q, state);
        }
        let mut bits = InfoVector::zeros(self.params.k_eff());
        for pair in self.pairs(r, state)? {
            if let IndexBlockValue::Bit(b) = pair.value {
                bits.set(b, pair.parity.parity(state));
            }
        }
        Ok(bits)
    }

    /// Flips bit `bit` within stage `r`, without moving to another stage.
    pub fn encode_stage(&self, r: usize, bit: usize, state: &CellState) -> Result<EncodeOutcome, CodeError> {
        let q = self.params.q;
        if r == 0 {
            return encode_blocks(&self.layout.parity, q, bit, state);
        }
        let pairs = self.pairs(r, state)?;
        let mut next = state.clone();
        if let Some(pair) = pairs.iter().find(|p| p.value == IndexBlockValue::Bit(bit)) {
            increment(pair.parity.cells_mut(&mut next), q)?;
            if pair.parity.status(&next, q) == BlockStatus::Full {
                self.write_index_block(&pair.index, IndexBlockValue::Full, r, &mut next)?;
            }
            return Ok(EncodeOutcome::Next(next));
        }
        if let Some(pair) = pairs.iter().find(|p| p.value == IndexBlockValue::Available) {
            // No live pair carries the bit, so it currently reads 0.
            let target = 1;
            self.write_index_block(&pair.index, IndexBlockValue::Bit(bit), r, &mut next)?;
            if pair.parity.parity(&next) != target {
                increment(pair.parity.cells_mut(&mut next), q)?;
            }
            if pair.parity.status(&next, q) == BlockStatus::Full {
                self.write_index_block(&pair.index, IndexBlockValue::Full, r, &mut next)?;
            }
            return Ok(EncodeOutcome::Next(next));
        }
        Ok(EncodeOutcome::Erase)
    }

    /// Moves from stage `r - 1` to stage `r`, re-recording `bits` (the
    /// `k_eff`-bit vector decoded at stage `r - 1`) in the first `k_eff` live
    /// blocks of the finer partition.
    pub fn transition(&self, r: usize, state: &CellState, bits: &InfoVector) -> Result<EncodeOutcome, CodeError> {
        let k = self.params.k_eff();
        let q = self.params.q;
        if r == 0 || r >= self.stage_count() {
            return Err(CodeError::InvalidParams(format!("no transition into stage {r}")));
        }
        let live: Vec<BlockView> = self.stage_blocks(r).filter(|b| b.status(state, q).is_live()).collect();
        if live.len() < k {
            return Ok(EncodeOutcome::Erase);
        }
        let batch = self.batch(r);
        if live.len() > batch.len() {
            return Err(CodeError::CorruptedState(format!(
                "stage {r}: {} live parity blocks exceed {} index blocks",
                live.len(),
                batch.len()
            )));
        }

        let mut next = state.clone();
        if self.variant == IndexVariant::Stacked {
            let floor = self.coding(r).floor;
            if floor > 0 {
                for u in batch {
                    for cell in u.cells_mut(&mut next) {
                        if *cell + 1 < floor || *cell > floor {
                            return Err(CodeError::CorruptedState(format!(
                                "stacked index cell at level {cell} outside window below floor {floor}"
                            )));
                        }
                        *cell = floor;
                    }
                }
            }
            let tally = self.layout.tally.expect("stacked layout with stages has a tally");
            increment(tally.cells_mut(&mut next), q)?;
        }

        for (l, u) in batch.iter().enumerate() {
            let value = if l < k {
                IndexBlockValue::Bit(l)
            } else if l < live.len() {
                IndexBlockValue::Available
            } else {
                IndexBlockValue::Full
            };
            self.write_index_block(u, value, r, &mut next)?;
        }
        for (i, block) in live.iter().take(k).enumerate() {
            if block.parity(&next) != bits.get(i) {
                increment(block.cells_mut(&mut next), q)?;
                if block.status(&next, q) == BlockStatus::Full {
                    self.write_index_block(&batch[i], IndexBlockValue::Full, r, &mut next)?;
                }
            }
        }
        Ok(EncodeOutcome::Next(next))
    }
}

impl FlashCode for MultistageCode {
    fn params(&self) -> &CodeParams {
        &self.params
    }

    fn encode(&self, bit: usize, state: &CellState) -> Result<EncodeOutcome, CodeError> {
        self.check_bit(bit)?;
        state.validate(&self.params)?;
        let mut r = self.current_stage(state)?;
        let mut current = std::borrow::Cow::Borrowed(state);
        loop {
            match self.encode_stage(r, bit, &current)? {
                EncodeOutcome::Next(next) => return Ok(EncodeOutcome::Next(next)),
                EncodeOutcome::Erase if r + 1 < self.stage_count() => {
                    let bits = self.decode_stage(r, &current)?;
                    match self.transition(r + 1, &current, &bits)? {
                        EncodeOutcome::Next(next) => current = std::borrow::Cow::Owned(next),
                        EncodeOutcome::Erase => return Ok(EncodeOutcome::Erase),
                    }
                    r += 1;
                }
                EncodeOutcome::Erase => return Ok(EncodeOutcome::Erase),
            }
        }
    }

    fn decode(&self, state: &CellState) -> Result<InfoVector, CodeError> {
        state.validate(&self.params)?;
        let r = self.current_stage(state)?;
        Ok(self.decode_stage(r, state)?.truncated(self.params.k))
    }

    fn capacity_bound(&self) -> u64 {
        bound_for(&self.params).expect("multistage bounds are total")
    }

    fn stage(&self, state: &CellState) -> Result<usize, CodeError> {
        self.current_stage(state)
    }

    fn allocations(&self, state: &CellState) -> Result<Vec<Option<u64>>, CodeError> {
        let k = self.params.k_eff();
        let q = self.params.q;
        let r = self.current_stage(state)?;
        let mut out = if r == 0 {
            block_allocations(&self.layout.parity, k, q, state)?
        } else {
            let mut out = vec![None; k];
            for pair in self.pairs(r, state)? {
                if let IndexBlockValue::Bit(b) = pair.value {
                    let cells = pair.parity.cells(state);
                    out[b] = Some((cells.len() * (q - 1)) as u64 - weight(cells));
                }
            }
            out
        };
        out.truncate(self.params.k);
        Ok(out)
    }
}

#[cfg(test)]
mod tests;
