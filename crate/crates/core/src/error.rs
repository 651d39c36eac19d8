use thiserror::Error;

use crate::script::EditOp;

#[derive(Debug, Error)]
pub enum Error {
    /// An edit script op addressed a position outside the string it was
    /// applied to. `len` is the string length at the time the op ran.
    #[error("script op #{index} ({op:?}) out of range for string of length {len}")]
    ScriptOpOutOfRange { index: usize, op: EditOp, len: usize },

    /// An alignment pair claimed to connect unequal symbols.
    #[error("alignment pair ({u_pos}, {v_pos}) connects unequal symbols")]
    MismatchedPair { u_pos: usize, v_pos: usize },

    /// A block-alignment edge failed the full-edit-match precondition.
    #[error("block edge ({x_block}, {y_block}) is not a full edit match")]
    EdgeNotMatching { x_block: usize, y_block: usize },

    /// A quadratic-cost operation was asked to run above its size guard.
    #[error("{what}: size {actual} exceeds guard {limit} (pass force to override)")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A source profile does not describe the string it was queried with.
    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),

    #[error("symbol {byte:#04x} at offset {offset} is outside the declared alphabet")]
    BadSymbol { byte: u8, offset: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
