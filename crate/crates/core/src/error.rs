use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A position or ordinal lies outside the valid range of the structure.
    #[error("position {pos} out of range (valid: {min}..={max})")]
    OutOfRange { pos: u64, min: u64, max: u64 },

    /// A select asked for an occurrence that does not exist.
    #[error("occurrence {ordinal} not found (only {available} present)")]
    NotFound { ordinal: u64, available: u64 },

    #[error("unknown word {0:?}")]
    UnknownWord(String),

    #[error("corrupt codeword stream: {0}")]
    CorruptStream(&'static str),

    #[error("invalid (s,c) parameters: s = {s}, c = {c}")]
    InvalidParams { s: u32, c: u32 },

    #[error("rank {rank} exceeds the capacity of {max_len}-byte codewords for s = {s}")]
    CapacityExceeded { rank: u64, s: u32, max_len: usize },

    #[error("{source_name}: invalid UTF-8 at byte offset {offset}")]
    InvalidEncoding { source_name: String, offset: usize },

    #[error("{source_name}: reserved sentinel {glyph:?} found at byte offset {offset}")]
    SentinelInInput {
        source_name: String,
        glyph: String,
        offset: usize,
    },

    #[error("collection has no documents")]
    EmptyCollection,

    #[error("malformed index file: {0}")]
    Format(String),

    #[error("unsupported index format version {0}")]
    UnsupportedVersion(u32),

    #[error("operation requires word bitmaps, but the index was built without them")]
    MissingBitmaps,

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn out_of_range(pos: impl TryInto<u64>, min: u64, max: u64) -> Self {
        Error::OutOfRange {
            pos: pos.try_into().unwrap_or(u64::MAX),
            min,
            max,
        }
    }
}
