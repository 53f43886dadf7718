use crate::cell::{CellState, EncodeOutcome, InfoVector};
use crate::constant_rate::ConstantRateCode;
use crate::error::CodeError;
use crate::indexless::IndexlessCode;
use crate::multistage::MultistageCode;
use crate::params::{CodeParams, Scheme};

/// Common interface of every flash code.
///
/// Codes are stateless: the cell state is passed in and a successor state is
/// handed back, so decode is always a pure function of the cells.
pub trait FlashCode {
    fn params(&self) -> &CodeParams;

    fn init(&self) -> CellState {
        CellState::zeros(self.params().n)
    }

    /// Flips information bit `bit`. Returns [`EncodeOutcome::Erase`] when the
    /// write cannot be absorbed without a block erasure.
    fn encode(&self, bit: usize, state: &CellState) -> Result<EncodeOutcome, CodeError>;

    fn decode(&self, state: &CellState) -> Result<InfoVector, CodeError>;

    /// Upper bound on the write deficiency `n(q-1) - t` of this code.
    fn capacity_bound(&self) -> u64;

    /// Encoding stage (multi-stage codes) or phase minus one (constant-rate).
    fn stage(&self, state: &CellState) -> Result<usize, CodeError>;

    /// For each logical bit, the number of levels still free in the live
    /// block currently representing it, or `None` if no block holds it.
    fn allocations(&self, state: &CellState) -> Result<Vec<Option<u64>>, CodeError>;

    fn check_bit(&self, bit: usize) -> Result<(), CodeError> {
        let k = self.params().k;
        if bit < k {
            Ok(())
        } else {
            Err(CodeError::BitOutOfRange { bit, k })
        }
    }
}

/// Any of the supported codes, selected by [`Scheme`].
#[derive(Clone, Debug)]
pub enum Codec {
    Indexless(IndexlessCode),
    Multistage(MultistageCode),
    ConstantRate(ConstantRateCode),
}

impl Codec {
    pub fn new(params: CodeParams) -> Result<Self, CodeError> {
        Ok(match params.scheme {
            Scheme::Indexless => Codec::Indexless(IndexlessCode::new(params)?),
            Scheme::MultistageBaseQ | Scheme::MultistageStacked => Codec::Multistage(MultistageCode::new(params)?),
            Scheme::ConstantRate => Codec::ConstantRate(ConstantRateCode::new(params)?),
        })
    }

    fn inner(&self) -> &dyn FlashCode {
        match self {
            Codec::Indexless(c) => c,
            Codec::Multistage(c) => c,
            Codec::ConstantRate(c) => c,
        }
    }
}

impl FlashCode for Codec {
    fn params(&self) -> &CodeParams {
        self.inner().params()
    }

    fn encode(&self, bit: usize, state: &CellState) -> Result<EncodeOutcome, CodeError> {
        self.inner().encode(bit, state)
    }

    fn decode(&self, state: &CellState) -> Result<InfoVector, CodeError> {
        self.inner().decode(state)
    }

    fn capacity_bound(&self) -> u64 {
        self.inner().capacity_bound()
    }

    fn stage(&self, state: &CellState) -> Result<usize, CodeError> {
        self.inner().stage(state)
    }

    fn allocations(&self, state: &CellState) -> Result<Vec<Option<u64>>, CodeError> {
        self.inner().allocations(state)
    }
}
