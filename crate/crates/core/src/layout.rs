//! Placement of parity, index and tally regions inside the `n` cells.
//!
//! Parity blocks occupy the head of the state. Index and tally regions are
//! carved out of the tail. Whatever is left between them is never written.

use std::ops::Range;

use crate::cell::{BlockRole, BlockView};
use crate::error::CodeError;
use crate::numeral::ceil_log;
use crate::params::{CodeParams, Scheme};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub params: CodeParams,
    /// Stage-0 parity blocks (for constant-rate: the single parity group).
    pub parity: Vec<BlockView>,
    /// Index block groups: one batch per stage `1..s` for base-`q`
    /// indexing, one stack per `q - 1` stages for stacked indexing, and the
    /// slot list for constant-rate.
    pub index: Vec<Vec<BlockView>>,
    pub tally: Option<BlockView>,
    pub unused: Range<usize>,
}

impl Layout {
    pub fn new(params: &CodeParams) -> Result<Self, CodeError> {
        match params.scheme {
            Scheme::ConstantRate => Self::constant_rate(params),
            _ => Self::block_coded(params),
        }
    }

    fn block_coded(params: &CodeParams) -> Result<Self, CodeError> {
        let k = params.k_eff();
        let reserved = params.reserved_cells();
        let available = params.n.checked_sub(reserved).ok_or_else(|| {
            CodeError::InsufficientCells(format!("{reserved} reserved index cells exceed n = {}", params.n))
        })?;
        let m = available / k;
        if m < k {
            return Err(CodeError::InsufficientCells(format!(
                "{m} parity blocks of {k} cells fit in {available} cells, need at least {k}"
            )));
        }
        let parity = (0..m).map(|j| BlockView::new(j * k, k, BlockRole::Parity)).collect();

        let batch_len = 2 * (k - 1);
        let (groups, width) = match params.scheme {
            Scheme::MultistageBaseQ => (params.stage_count().saturating_sub(1), params.mu()),
            Scheme::MultistageStacked => (params.stack_count(), params.mu_binary()),
            _ => (0, 0),
        };
        let mut cursor = available;
        let mut index = Vec::with_capacity(groups);
        for _ in 0..groups {
            let group = (0..batch_len).map(|l| BlockView::new(cursor + l * width, width, BlockRole::Index)).collect();
            cursor += batch_len * width;
            index.push(group);
        }
        let tally = (params.scheme == Scheme::MultistageStacked && params.stack_count() > 0)
            .then(|| BlockView::new(cursor, params.stack_count(), BlockRole::Tally));

        Ok(Layout { params: *params, parity, index, tally, unused: m * k..available })
    }

    fn constant_rate(params: &CodeParams) -> Result<Self, CodeError> {
        let width = ceil_log(2, params.k_eff() as u64 + 2) as usize;
        let slots = (params.n.saturating_sub(params.k + 1)) / width;
        if slots < 1 {
            return Err(CodeError::InsufficientCells(format!(
                "no room for an index slot of {width} cells after {} parity and tally cells",
                params.k + 1
            )));
        }
        let start = params.k + 1;
        let group = (0..slots).map(|j| BlockView::new(start + j * width, width, BlockRole::Index)).collect();
        Ok(Layout {
            params: *params,
            parity: vec![BlockView::new(0, params.k, BlockRole::Parity)],
            index: vec![group],
            tally: Some(BlockView::new(params.k, 1, BlockRole::Tally)),
            unused: start + slots * width..params.n,
        })
    }

    /// Number of stage-0 parity blocks, `m`.
    pub fn block_count(&self) -> usize {
        self.parity.len()
    }

    /// Cells per stage-0 parity block.
    pub fn block_len(&self) -> usize {
        self.parity.first().map_or(0, |b| b.len)
    }

    /// Cells covered by stage-0 parity blocks.
    pub fn parity_region(&self) -> Range<usize> {
        let start = self.parity.first().map_or(0, |b| b.offset);
        start..self.parity.last().map_or(0, |b| b.end())
    }

    /// Every window in the layout, in cell order.
    pub fn blocks(&self) -> Vec<BlockView> {
        let mut all: Vec<BlockView> =
            self.parity.iter().chain(self.index.iter().flatten()).chain(self.tally.iter()).copied().collect();
        all.sort_by_key(|b| b.offset);
        all
    }

    pub fn index_cells(&self) -> usize {
        self.index.iter().flatten().map(|b| b.len).sum()
    }
}

/// The list of block windows for `params`.
pub fn layout(params: &CodeParams) -> Result<Vec<BlockView>, CodeError> {
    Ok(Layout::new(params)?.blocks())
}
