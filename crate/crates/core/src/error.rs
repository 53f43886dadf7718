use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("insufficient cells: {0}")]
    InsufficientCells(String),
    #[error("bit index {bit} out of range for k = {k}")]
    BitOutOfRange { bit: usize, k: usize },
    #[error("corrupted state: {0}")]
    CorruptedState(String),
    #[error("block is already full")]
    FullBlock,
    #[error("block is not empty")]
    NotEmpty,
    #[error("illegal index block transition from {from} to {to}")]
    IllegalTransition { from: String, to: String },
    #[error("state has {got} cells, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
}
