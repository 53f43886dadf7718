//! Index blocks: small cell groups naming the bit a parity block carries.
//!
//! A block holds a numeral: 0 means the paired parity block is available,
//! `b + 1` means it stores bit `b`, and the all-top numeral marks it full.
//! Base-`q` blocks use every level of their cells. Stacked binary blocks use
//! only a two-level window `[floor, floor + 1]`, so several stages can reuse
//! the same cells at increasing floors.

use std::fmt;

use crate::error::CodeError;
use crate::numeral::{from_digits, to_digits};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexBlockValue {
    Available,
    Bit(usize),
    Full,
}

impl fmt::Display for IndexBlockValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexBlockValue::Available => f.write_str("available"),
            IndexBlockValue::Bit(b) => write!(f, "bit({b})"),
            IndexBlockValue::Full => f.write_str("full"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexVariant {
    BaseQ,
    Stacked,
}

/// How index blocks of one stage map numerals onto cell levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexCoding {
    pub radix: u64,
    pub floor: u8,
    pub width: usize,
    /// Padded bit count; valid bit values are `1..=k_eff`.
    pub k_eff: usize,
}

impl IndexCoding {
    /// Base-`q` coding: digits are cell levels.
    pub fn base_q(q: usize, width: usize, k_eff: usize) -> Self {
        IndexCoding { radix: q as u64, floor: 0, width, k_eff }
    }

    /// Stacked binary coding: digits are offsets above `floor`.
    pub fn stacked(floor: u8, width: usize, k_eff: usize) -> Self {
        IndexCoding { radix: 2, floor, width, k_eff }
    }

    /// Coding used by stage `r >= 1`.
    pub fn for_stage(variant: IndexVariant, r: usize, q: usize, width: usize, k_eff: usize) -> Self {
        debug_assert!(r >= 1);
        match variant {
            IndexVariant::BaseQ => Self::base_q(q, width, k_eff),
            IndexVariant::Stacked => Self::stacked(((r - 1) % (q - 1)) as u8, width, k_eff),
        }
    }

    fn top(&self) -> u64 {
        self.radix.pow(self.width as u32) - 1
    }

    pub fn ceiling(&self) -> u8 {
        self.floor + (self.radix - 1) as u8
    }

    fn numeral(&self, value: IndexBlockValue) -> u64 {
        match value {
            IndexBlockValue::Available => 0,
            IndexBlockValue::Bit(b) => b as u64 + 1,
            IndexBlockValue::Full => self.top(),
        }
    }

    pub fn read(&self, cells: &[u8]) -> Result<IndexBlockValue, CodeError> {
        debug_assert_eq!(cells.len(), self.width);
        if let Some(&bad) = cells.iter().find(|&&l| l < self.floor || l > self.ceiling()) {
            return Err(CodeError::CorruptedState(format!(
                "index cell level {bad} outside window [{}, {}]",
                self.floor,
                self.ceiling()
            )));
        }
        let value = from_digits(cells.iter().map(|&l| l - self.floor), self.radix);
        match value {
            0 => Ok(IndexBlockValue::Available),
            v if v == self.top() => Ok(IndexBlockValue::Full),
            v if v <= self.k_eff as u64 => Ok(IndexBlockValue::Bit(v as usize - 1)),
            v => Err(CodeError::CorruptedState(format!("index block numeral {v} names no bit"))),
        }
    }

    pub fn write(&self, cells: &mut [u8], value: IndexBlockValue) -> Result<(), CodeError> {
        let current = self.read(cells)?;
        let legal = current == value
            || matches!(
                (current, value),
                (IndexBlockValue::Available, IndexBlockValue::Bit(_) | IndexBlockValue::Full)
                    | (IndexBlockValue::Bit(_), IndexBlockValue::Full)
            );
        let digits = match value {
            IndexBlockValue::Bit(b) if b >= self.k_eff => None,
            _ => to_digits(self.numeral(value), self.radix, self.width),
        };
        let digits = match (legal, digits) {
            (true, Some(d)) => d,
            _ => return Err(CodeError::IllegalTransition { from: current.to_string(), to: value.to_string() }),
        };
        for (cell, digit) in cells.iter_mut().zip(digits) {
            let target = self.floor + digit;
            debug_assert!(target >= *cell, "index write would lower a cell");
            *cell = target.max(*cell);
        }
        Ok(())
    }
}
