//! Compressed full-text self-indexes behind one count/locate/extract contract.
//!
//! Index families:
//!
//! - [`ssa::SsaIndex`]: Huffman-shaped wavelet tree over the BWT with regular
//!   suffix-array sampling.
//! - [`af::AfIndex`]: the BWT cut into context blocks, one Huffman wavelet
//!   tree per block.
//! - [`fmi2::Fmi2Index`]: bucketed MTF/RLE/Huffman BWT with special-symbol
//!   text marking.
//! - [`csa::CsaIndex`]: compressed ψ with backward search by binary search.
//! - [`lz::LzIndex`]: LZ78 phrase tries with three-case occurrence search.
//! - [`plain::PlainSa`]: uncompressed suffix array, the baseline and oracle.
//!
//! Conventions: text positions, suffix-array rows and ranks are 1-based in
//! every public query API. The indexed text always ends with a terminator
//! that is smaller than every other symbol and occurs once. Internally
//! symbols are dense codes `0..sigma` with the terminator at code 0.

pub mod alloc;
pub mod bench;
pub mod bits;
pub mod bitseq;
pub mod csa;
pub mod entropy;
pub mod error;
pub mod fm;
pub mod fmi2;
pub mod huffman;
pub mod index;
pub mod lz;
pub mod patterns;
pub mod persist;
pub mod plain;
pub mod af;
pub mod sampling;
pub mod ssa;
pub mod synth;
pub mod text;
pub mod wavelet;

pub use error::{Error, Result};
pub use index::{AnyIndex, IndexKind, IndexParams, SelfIndex, SpaceReport, WalkStats};
pub use text::{Alphabet, MappedText};

/// Dense symbol code. The terminator is code 0.
pub type Sym = u16;

/// Rank and access over a symbol sequence, 1-based.
pub trait RankAccess {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Occurrences of `c` among positions `1..=i`.
    fn rank(&self, c: Sym, i: usize) -> usize;

    /// Symbol at position `i` (1-based).
    fn access(&self, i: usize) -> Sym;

    /// `(access(i), rank(access(i), i))` in one pass where possible.
    fn access_rank(&self, i: usize) -> (Sym, usize) {
        let c = self.access(i);
        (c, self.rank(c, i))
    }
}
