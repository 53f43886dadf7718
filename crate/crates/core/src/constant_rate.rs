//! Constant-rate code for `k/n` bounded away from zero.
//!
//! Cells are split into a parity group of `k` cells, one phase tally cell,
//! and an index group of fixed-width slots. Writing runs in `q - 1` phases;
//! phase `p` uses levels `p-1` and `p`. Each write logs `bit + 1` in binary
//! into the next free slot. When the slots run out the current vector is
//! copied into the parity group, every index cell is lifted to the next
//! floor, and the tally advances.

use crate::analysis::bounds::{bound_for, constant_rate_capacity};
use crate::cell::{CellState, EncodeOutcome, InfoVector};
use crate::codec::FlashCode;
use crate::error::CodeError;
use crate::layout::Layout;
use crate::multistage::{IndexBlockValue, IndexCoding};
use crate::params::CodeParams;

#[derive(Clone, Debug)]
pub struct ConstantRateCode {
    params: CodeParams,
    layout: Layout,
}

impl ConstantRateCode {
    pub fn new(params: CodeParams) -> Result<Self, CodeError> {
        let layout = Layout::new(&params)?;
        if layout.tally.is_none() || layout.index.len() != 1 {
            return Err(CodeError::InvalidParams(format!("{} is not the constant-rate scheme", params.scheme)));
        }
        Ok(ConstantRateCode { params, layout })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Number of index slots per phase.
    pub fn slot_count(&self) -> usize {
        self.layout.index[0].len()
    }

    /// Exact number of guaranteed writes.
    pub fn capacity(&self) -> u64 {
        constant_rate_capacity(&self.params).expect("layout already validated")
    }

    /// Current phase in `1..=q-1`.
    pub fn phase(&self, state: &CellState) -> Result<usize, CodeError> {
        let tally = self.layout.tally.expect("constant-rate layout has a tally");
        let p = tally.cells(state)[0] as usize + 1;
        if p > self.params.q - 1 {
            return Err(CodeError::CorruptedState(format!("phase {p} exceeds q - 1")));
        }
        Ok(p)
    }

    fn coding(&self, phase: usize) -> IndexCoding {
        let width = self.layout.index[0][0].len;
        IndexCoding::stacked((phase - 1) as u8, width, self.params.k)
    }

    /// Bits recorded in the used prefix of the slots for `phase`.
    fn logged_bits(&self, phase: usize, state: &CellState) -> Result<Vec<usize>, CodeError> {
        let coding = self.coding(phase);
        let mut logged = Vec::new();
        let mut free_seen = false;
        for slot in &self.layout.index[0] {
            match coding.read(slot.cells(state))? {
                IndexBlockValue::Available => free_seen = true,
                IndexBlockValue::Bit(b) if !free_seen => logged.push(b),
                IndexBlockValue::Bit(_) => {
                    return Err(CodeError::CorruptedState("used slots do not form a prefix".into()))
                }
                IndexBlockValue::Full => return Err(CodeError::CorruptedState("slot holds no bit index".into())),
            }
        }
        Ok(logged)
    }

    fn baseline(&self, phase: usize, state: &CellState) -> InfoVector {
        let group = self.layout.parity[0].cells(state);
        let bits = group.iter().map(|&l| u8::from(phase > 1 && usize::from(l) >= phase - 1)).collect();
        InfoVector::from_bits(bits)
    }
}

impl FlashCode for ConstantRateCode {
    fn params(&self) -> &CodeParams {
        &self.params
    }

    fn encode(&self, bit: usize, state: &CellState) -> Result<EncodeOutcome, CodeError> {
        self.check_bit(bit)?;
        state.validate(&self.params)?;
        let p = self.phase(state)?;
        let used = self.logged_bits(p, state)?.len();
        let slots = &self.layout.index[0];
        let mut next = state.clone();
        if used < slots.len() {
            self.coding(p).write(slots[used].cells_mut(&mut next), IndexBlockValue::Bit(bit))?;
            return Ok(EncodeOutcome::Next(next));
        }
        if p == self.params.q - 1 {
            return Ok(EncodeOutcome::Erase);
        }

        let bits = self.decode(state)?;
        let group = self.layout.parity[0].cells_mut(&mut next);
        for (j, cell) in group.iter_mut().enumerate() {
            let target = (p - 1) as u8 + bits.get(j);
            if target < *cell {
                return Err(CodeError::CorruptedState(format!(
                    "parity cell {j} at level {cell} above snapshot level {target}"
                )));
            }
            *cell = target;
        }
        for slot in slots {
            for cell in slot.cells_mut(&mut next) {
                *cell = p as u8;
            }
        }
        self.layout.tally.expect("tally present").cells_mut(&mut next)[0] += 1;
        self.coding(p + 1).write(slots[0].cells_mut(&mut next), IndexBlockValue::Bit(bit))?;
        Ok(EncodeOutcome::Next(next))
    }

    fn decode(&self, state: &CellState) -> Result<InfoVector, CodeError> {
        state.validate(&self.params)?;
        let p = self.phase(state)?;
        let mut bits = self.baseline(p, state);
        for b in self.logged_bits(p, state)? {
            bits.flip(b);
        }
        Ok(bits)
    }

    fn capacity_bound(&self) -> u64 {
        bound_for(&self.params).expect("layout already validated")
    }

    fn stage(&self, state: &CellState) -> Result<usize, CodeError> {
        Ok(self.phase(state)? - 1)
    }

    fn allocations(&self, _state: &CellState) -> Result<Vec<Option<u64>>, CodeError> {
        Ok(vec![None; self.params.k])
    }
}
