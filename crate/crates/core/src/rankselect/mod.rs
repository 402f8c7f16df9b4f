//! Succinct substrates: byte sequences with per-value rank/select, plain
//! bitvectors, and the end-of-document boundary array.

mod bits;
mod bounds;
mod bytes;

pub use bits::{BitVector, BitVectorBuilder};
pub use bounds::DocBoundaries;
pub use bytes::{ByteSequence, DEFAULT_BLOCK_SIZE};
