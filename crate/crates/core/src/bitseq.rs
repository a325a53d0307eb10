//! Immutable bit sequences with rank, select, and access.
//!
//! Positions are 1-based: `access(i)` reads bit `i` for `1 <= i <= n`, and
//! `rank1(i)` counts the ones among bits `1..=i` (so `rank1(0) == 0`).
//!
//! Rank uses one absolute counter every `block_size` bits plus a popcount
//! scan of the partial block. Select binary-searches the block counters and
//! then scans words inside the block.

use crate::bits::BitBuf;
use crate::error::{check_range, Error, Result};
use crate::persist::{ByteReader, ByteWriter, Persist};

pub const DEFAULT_BLOCK_SIZE: u32 = 512;
pub const MIN_BLOCK_SIZE: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSeq {
    n: usize,
    raw: BitBuf,
    block_size: u32,
    /// `super_ranks[k]` = ones in the first `k * block_size` bits.
    super_ranks: Vec<u64>,
}

impl BitSeq {
    pub fn build<I>(bits: I, block_size: u32) -> Result<Self>
    where
        I: IntoIterator<Item = bool>,
    {
        if block_size < MIN_BLOCK_SIZE {
            return Err(Error::Param(format!(
                "block_size must be >= {MIN_BLOCK_SIZE}, got {block_size}"
            )));
        }
        let mut raw = BitBuf::new();
        for b in bits {
            raw.push(b);
        }
        Ok(Self::from_bitbuf(raw, block_size))
    }

    /// Builds with the default block size.
    pub fn from_bools(bits: &[bool]) -> Self {
        Self::build(bits.iter().copied(), DEFAULT_BLOCK_SIZE).expect("default block size is valid")
    }

    pub(crate) fn from_bitbuf(raw: BitBuf, block_size: u32) -> Self {
        let n = raw.len();
        let bs = block_size as usize;
        let mut super_ranks = Vec::with_capacity(n / bs + 1);
        let mut acc = 0u64;
        super_ranks.push(0);
        let mut start = 0;
        while start + bs <= n {
            acc += count_ones(&raw, start, start + bs) as u64;
            super_ranks.push(acc);
            start += bs;
        }
        Self {
            n,
            raw,
            block_size,
            super_ranks,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn block_size(&self) -> u32 {
        self.block_size
    }

    pub fn super_ranks(&self) -> &[u64] {
        &self.super_ranks
    }

    pub fn count_ones(&self) -> usize {
        self.rank1_unchecked(self.n)
    }

    pub fn access(&self, i: usize) -> Result<bool> {
        check_range("bit position", i, 1, self.n)?;
        Ok(self.raw.get(i - 1))
    }

    /// Bit `i` (1-based) without range checks beyond a debug assertion.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i >= 1 && i <= self.n);
        self.raw.get(i - 1)
    }

    pub fn rank1(&self, i: usize) -> Result<usize> {
        check_range("rank position", i, 0, self.n)?;
        Ok(self.rank1_unchecked(i))
    }

    pub fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i - self.rank1(i)?)
    }

    #[inline]
    pub fn rank1_unchecked(&self, i: usize) -> usize {
        debug_assert!(i <= self.n);
        let bs = self.block_size as usize;
        let k = i / bs;
        self.super_ranks[k] as usize + count_ones(&self.raw, k * bs, i)
    }

    #[inline]
    pub fn rank0_unchecked(&self, i: usize) -> usize {
        i - self.rank1_unchecked(i)
    }

    /// Position of the `j`-th one (1-based).
    pub fn select1(&self, j: usize) -> Result<usize> {
        check_range("select rank", j, 1, self.count_ones())?;
        Ok(self.select1_unchecked(j))
    }

    pub fn select1_unchecked(&self, j: usize) -> usize {
        let j = j as u64;
        // last block whose starting rank is < j
        let k = self.super_ranks.partition_point(|&r| r < j) - 1;
        let mut remaining = j - self.super_ranks[k];
        let mut pos = k * self.block_size as usize;
        let words = self.raw.words();
        // align to a word boundary first
        while !pos.is_multiple_of(64) {
            if self.raw.get(pos) {
                remaining -= 1;
                if remaining == 0 {
                    return pos + 1;
                }
            }
            pos += 1;
        }
        let mut w = pos / 64;
        loop {
            let ones = words[w].count_ones() as u64;
            if ones >= remaining {
                let mut word = words[w];
                for _ in 1..remaining {
                    word &= word - 1;
                }
                return w * 64 + word.trailing_zeros() as usize + 1;
            }
            remaining -= ones;
            w += 1;
        }
    }

    /// Payload bits and rank-directory bits.
    pub fn size_bits(&self) -> (usize, usize) {
        (self.n, self.super_ranks.len() * 64)
    }

    pub fn total_bits(&self) -> usize {
        let (a, b) = self.size_bits();
        a + b
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.n).map(|i| self.raw.get(i))
    }
}

/// Ones in raw bit range `[from, to)`.
#[inline]
fn count_ones(raw: &BitBuf, from: usize, to: usize) -> usize {
    if from >= to {
        return 0;
    }
    let words = raw.words();
    let (fw, fo) = (from / 64, from % 64);
    let (tw, to_) = (to / 64, to % 64);
    if fw == tw {
        let mask = ((1u64 << (to_ - fo)) - 1) << fo;
        return (words[fw] & mask).count_ones() as usize;
    }
    let mut c = (words[fw] >> fo).count_ones() as usize;
    for w in &words[fw + 1..tw] {
        c += w.count_ones() as usize;
    }
    if to_ > 0 {
        c += (words[tw] & ((1u64 << to_) - 1)).count_ones() as usize;
    }
    c
}

impl Persist for BitSeq {
    fn write_to(&self, w: &mut ByteWriter) {
        w.put_u64(self.n as u64);
        w.put_u32(self.block_size);
        w.put_u64s(self.raw.words());
        w.put_u64s(&self.super_ranks);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let n = r.usize()?;
        let block_size = r.u32()?;
        let words = r.u64s()?;
        let super_ranks = r.u64s()?;
        if block_size < MIN_BLOCK_SIZE {
            return Err(Error::Integrity(format!("bitseq block size {block_size}")));
        }
        let raw = BitBuf::from_words(words, n)?;
        let rebuilt = Self::from_bitbuf(raw, block_size);
        if rebuilt.super_ranks != super_ranks {
            return Err(Error::Integrity("bitseq rank directory mismatch".into()));
        }
        Ok(rebuilt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits_of(s: &str) -> Vec<bool> {
        s.bytes().map(|b| b == b'1').collect()
    }

    fn scan_rank(bits: &[bool], i: usize) -> usize {
        bits[..i].iter().filter(|&&b| b).count()
    }

    fn scan_select(bits: &[bool], j: usize) -> Option<usize> {
        let mut seen = 0;
        for (k, &b) in bits.iter().enumerate() {
            if b {
                seen += 1;
                if seen == j {
                    return Some(k + 1);
                }
            }
        }
        None
    }

    #[test]
    fn empty_sequence() {
        let b = BitSeq::build(std::iter::empty(), 8).unwrap();
        assert_eq!(b.len(), 0);
        assert_eq!(b.rank1(0).unwrap(), 0);
        assert!(b.rank1(1).is_err());
        assert!(b.select1(1).is_err());
        assert!(b.access(1).is_err());
    }

    #[test]
    fn small_example_rank_select_access() {
        let bits = bits_of("010110");
        let b = BitSeq::build(bits.iter().copied(), 8).unwrap();
        assert_eq!(b.len(), 6);
        assert_eq!(b.rank1(0).unwrap(), 0);
        assert_eq!(b.rank1(4).unwrap(), scan_rank(&bits, 4));
        assert_eq!(b.rank1(4).unwrap(), 2);
        assert_eq!(b.rank1(6).unwrap(), 3);
        assert_eq!(b.rank0(6).unwrap(), 3);
        assert_eq!(b.select1(1).unwrap(), 2);
        assert_eq!(b.select1(2).unwrap(), 4);
        assert!(b.select1(0).is_err());
        assert!(b.select1(4).is_err());
        assert!(!b.access(1).unwrap());
        assert!(b.access(2).unwrap());
        assert!(b.rank1(7).is_err());

        let one = BitSeq::build([true], 8).unwrap();
        assert_eq!(one.select1(1).unwrap(), 1);
        let zero = BitSeq::build([false], 8).unwrap();
        assert!(!zero.access(1).unwrap());
    }

    #[test]
    fn rejects_tiny_blocks() {
        assert!(matches!(BitSeq::build([true], 7), Err(Error::Param(_))));
    }

    #[test]
    fn super_ranks_match_prefix_sums() {
        let bits: Vec<bool> = (0..128).map(|i| i < 64).collect();
        let b = BitSeq::build(bits.iter().copied(), 64).unwrap();
        let oracle: Vec<u64> = (0..=bits.len() / 64)
            .map(|k| scan_rank(&bits, k * 64) as u64)
            .collect();
        assert_eq!(b.super_ranks(), oracle.as_slice());
        assert_eq!(b.super_ranks(), &[0, 64, 64]);
    }

    #[test]
    fn random_sequences_match_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..10_000 {
            let n = rng.gen_range(0..=4096usize.min(64 + trial));
            let density: f64 = rng.gen();
            let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(density)).collect();
            let bs = [8u32, 64, 100, 512][trial % 4];
            let b = BitSeq::build(bits.iter().copied(), bs).unwrap();
            let mut ones = 0;
            for i in 0..=n {
                if i > 0 && bits[i - 1] {
                    ones += 1;
                    assert_eq!(b.select1(ones).unwrap(), i);
                }
                assert_eq!(b.rank1_unchecked(i), ones);
            }
            assert_eq!(b.count_ones(), ones);
        }
    }

    proptest! {
        #[test]
        fn rank_independent_of_block_size(bits in proptest::collection::vec(any::<bool>(), 0..3000)) {
            let a = BitSeq::build(bits.iter().copied(), 8).unwrap();
            let b = BitSeq::build(bits.iter().copied(), 512).unwrap();
            for i in 0..=bits.len() {
                prop_assert_eq!(a.rank1_unchecked(i), b.rank1_unchecked(i));
            }
        }

        #[test]
        fn select_inverts_rank(bits in proptest::collection::vec(any::<bool>(), 1..2000)) {
            let b = BitSeq::build(bits.iter().copied(), 16).unwrap();
            for i in 1..=bits.len() {
                let r = b.rank1_unchecked(i);
                prop_assert_eq!(r - b.rank1_unchecked(i - 1), bits[i - 1] as usize);
                if r > 0 {
                    let s = b.select1_unchecked(r);
                    prop_assert_eq!(b.rank1_unchecked(s), r);
                    prop_assert_eq!(Some(s), scan_select(&bits, r));
                    if bits[i - 1] {
                        prop_assert_eq!(s, i);
                    }
                }
            }
        }

        #[test]
        fn persist_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..700)) {
            let b = BitSeq::build(bits.iter().copied(), 32).unwrap();
            let mut w = ByteWriter::new();
            b.write_to(&mut w);
            let bytes = w.into_inner();
            let back = BitSeq::read_from(&mut ByteReader::new(&bytes)).unwrap();
            prop_assert_eq!(back, b);
        }
    }
}
