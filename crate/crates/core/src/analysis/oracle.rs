//! Exact guaranteed-write count by exhaustive adversarial search.
//!
//! The adversary picks every next bit; the code answers deterministically.
//! The number of writes guaranteed from a state is
//! `t(x) = min_i (0 if encode(i, x) erases, else 1 + t(encode(i, x)))`,
//! memoized on the raw cell levels.

use std::collections::HashMap;

use thiserror::Error;

use crate::cell::{CellState, EncodeOutcome};
use crate::codec::FlashCode;
use crate::error::CodeError;

/// Default limit on memoized states.
pub const DEFAULT_MEMO_CAP: usize = 1 << 24;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Code(#[from] CodeError),
    /// The memo table outgrew its cap. `writes_upper_bound` is the shortest
    /// erasing write sequence seen so far, an upper bound on the exact value.
    #[error("oracle budget of {cap} states exceeded ({})", upper_bound_text(.writes_upper_bound))]
    BudgetExceeded { cap: usize, writes_upper_bound: Option<u64> },
    #[error("monotonicity violated: encode lowered a cell or consumed no level")]
    NonMonotone,
}

fn upper_bound_text(bound: &Option<u64>) -> String {
    match bound {
        Some(t) => format!("guaranteed writes <= {t}"),
        None => "no erasing sequence found yet".into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Largest `t` such that every write sequence of length `t` avoids erasure.
    pub writes: u64,
    /// Distinct states visited.
    pub states: usize,
}

struct Search<'a, C: ?Sized> {
    codec: &'a C,
    cap: usize,
    memo: HashMap<Vec<u8>, u32>,
    shortest_erase: Option<u64>,
}

impl<C: FlashCode + ?Sized> Search<'_, C> {
    fn solve(&mut self, state: &CellState, depth: u64) -> Result<u32, OracleError> {
        if let Some(&t) = self.memo.get(state.levels()) {
            return Ok(t);
        }
        let k = self.codec.params().k;
        let mut children = Vec::with_capacity(k);
        let mut erases = false;
        for bit in 0..k {
            match self.codec.encode(bit, state)? {
                EncodeOutcome::Erase => {
                    erases = true;
                    break;
                }
                EncodeOutcome::Next(next) => {
                    if !next.dominates(state) || next.total_weight() <= state.total_weight() {
                        return Err(OracleError::NonMonotone);
                    }
                    children.push(next);
                }
            }
        }
        let t = if erases {
            self.shortest_erase = Some(self.shortest_erase.map_or(depth, |d| d.min(depth)));
            0
        } else {
            let mut best = u32::MAX;
            for child in &children {
                best = best.min(1 + self.solve(child, depth + 1)?);
                if best == 1 {
                    break;
                }
            }
            best
        };
        if self.memo.len() >= self.cap {
            return Err(OracleError::BudgetExceeded { cap: self.cap, writes_upper_bound: self.shortest_erase });
        }
        self.memo.insert(state.levels().to_vec(), t);
        Ok(t)
    }
}

/// Exact number of writes the code guarantees from its initial state.
pub fn oracle_min_writes<C: FlashCode + ?Sized>(codec: &C, cap: usize) -> Result<OracleResult, OracleError> {
    let mut search = Search { codec, cap, memo: HashMap::new(), shortest_erase: None };
    let writes = search.solve(&codec.init(), 0)?;
    Ok(OracleResult { writes: u64::from(writes), states: search.memo.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Codec;
    use crate::params::{CodeParams, Scheme};

    fn oracle(n: usize, k: usize, q: usize, scheme: Scheme) -> u64 {
        let codec = Codec::new(CodeParams::new(n, k, q, scheme).unwrap()).unwrap();
        oracle_min_writes(&codec, DEFAULT_MEMO_CAP).unwrap().writes
    }

    #[test]
    fn small_indexless_values() {
        assert_eq!(oracle(4, 2, 2, Scheme::Indexless), 3);
        assert_eq!(oracle(4, 2, 3, Scheme::Indexless), 5);
        assert_eq!(oracle(6, 2, 2, Scheme::Indexless), 5);
    }

    #[test]
    fn single_block_is_fully_used() {
        // k = 1 with odd q: one block of one cell per bit
        assert_eq!(oracle(3, 1, 3, Scheme::Indexless), 6);
    }

    #[test]
    fn budget_exceeded_reports_upper_bound() {
        let codec = Codec::new(CodeParams::new(16, 4, 2, Scheme::Indexless).unwrap()).unwrap();
        match oracle_min_writes(&codec, 10) {
            Err(OracleError::BudgetExceeded { cap: 10, writes_upper_bound: Some(t) }) => {
                assert!((4..=16).contains(&t));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
