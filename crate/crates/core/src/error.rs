use thiserror::Error;

use crate::index::IndexKind;

#[derive(Debug, Error)]
pub enum Error {
    /// A construction parameter is outside its legal range.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// A position, row, or rank argument is outside the structure.
    #[error("{what} {value} out of range (valid: {lo}..={hi})")]
    Range {
        what: &'static str,
        value: usize,
        lo: usize,
        hi: usize,
    },

    /// The input text contains the reserved byte 0.
    #[error("input contains reserved byte 0x00 at offset {0}")]
    ReservedByte(usize),

    #[error("symbol {symbol} outside alphabet of size {sigma}")]
    Symbol { symbol: usize, sigma: usize },

    /// Corrupt, truncated, or otherwise malformed serialized data or BWT.
    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("index kind mismatch: expected {expected}, file holds {found}")]
    KindMismatch { expected: IndexKind, found: IndexKind },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(what: &'static str, value: usize, lo: usize, hi: usize) -> Result<()> {
    if value < lo || value > hi {
        Err(Error::Range { what, value, lo, hi })
    } else {
        Ok(())
    }
}
