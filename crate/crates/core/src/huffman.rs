//! Deterministic Huffman code lengths and canonical code assignment.
//!
//! Merging always combines the two lowest-weight subtrees; equal weights are
//! ordered by the smallest symbol each subtree contains. The resulting length
//! table fully determines the canonical code, so only lengths need storing.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::bits::{BitBuf, BitCursor};
use crate::error::{Error, Result};

/// Code length per symbol; 0 marks an absent symbol. A single present
/// symbol gets length 0 as well (it needs no bits).
pub fn code_lengths(freqs: &[u64]) -> Vec<u8> {
    let mut lengths = vec![0u8; freqs.len()];
    let present: Vec<usize> = (0..freqs.len()).filter(|&s| freqs[s] > 0).collect();
    if present.len() <= 1 {
        return lengths;
    }
    // node arena: leaves first, internal nodes appended
    let mut parent: Vec<usize> = vec![usize::MAX; present.len()];
    let mut heap: BinaryHeap<Reverse<(u64, usize, usize)>> = present
        .iter()
        .enumerate()
        .map(|(node, &sym)| Reverse((freqs[sym], sym, node)))
        .collect();
    while heap.len() > 1 {
        let Reverse((w1, s1, a)) = heap.pop().unwrap();
        let Reverse((w2, s2, b)) = heap.pop().unwrap();
        let node = parent.len();
        parent.push(usize::MAX);
        parent[a] = node;
        parent[b] = node;
        heap.push(Reverse((w1 + w2, s1.min(s2), node)));
    }
    for (leaf, &sym) in present.iter().enumerate() {
        let mut depth = 0u8;
        let mut v = leaf;
        while parent[v] != usize::MAX {
            v = parent[v];
            depth += 1;
        }
        lengths[sym] = depth;
    }
    lengths
}

/// Canonical codes from lengths: symbols sorted by `(length, symbol)` get
/// consecutive code values. Returns `(code, length)` per symbol, MSB-first.
pub fn canonical_codes(lengths: &[u8]) -> Vec<(u64, u8)> {
    let mut order: Vec<usize> = (0..lengths.len()).filter(|&s| lengths[s] > 0).collect();
    order.sort_by_key(|&s| (lengths[s], s));
    let mut codes = vec![(0u64, 0u8); lengths.len()];
    let mut code = 0u64;
    let mut prev_len = 0u8;
    for &s in &order {
        let len = lengths[s];
        code <<= len - prev_len;
        codes[s] = (code, len);
        code += 1;
        prev_len = len;
    }
    codes
}

/// Checks that a length table describes a complete prefix code (or a
/// degenerate zero/one-symbol code).
pub fn validate_lengths(lengths: &[u8]) -> Result<()> {
    let present = lengths.iter().filter(|&&l| l > 0).count();
    if present == 0 {
        return Ok(());
    }
    if lengths.iter().any(|&l| l > 63) {
        return Err(Error::Integrity("huffman code longer than 63 bits".into()));
    }
    // Kraft sum must be exactly 1 for a full binary tree
    let max = *lengths.iter().max().unwrap() as u32;
    let kraft: u128 = lengths
        .iter()
        .filter(|&&l| l > 0)
        .map(|&l| 1u128 << (max - l as u32))
        .sum();
    if kraft != 1u128 << max || present == 1 {
        return Err(Error::Integrity("huffman lengths are not a complete code".into()));
    }
    Ok(())
}

/// Table-driven canonical decoder.
#[derive(Debug, Clone)]
pub struct Decoder {
    /// Symbols sorted by (length, symbol).
    sorted: Vec<usize>,
    /// For each length L: (first code of length L, index into `sorted`, count).
    per_len: Vec<(u64, usize, usize)>,
    single: Option<usize>,
}

impl Decoder {
    pub fn new(lengths: &[u8]) -> Result<Self> {
        let present: Vec<usize> = (0..lengths.len()).filter(|&s| lengths[s] > 0).collect();
        if present.is_empty() {
            // zero-length codes: at most one symbol is implied by the caller
            return Ok(Self {
                sorted: Vec::new(),
                per_len: Vec::new(),
                single: None,
            });
        }
        validate_lengths(lengths)?;
        let mut sorted = present;
        sorted.sort_by_key(|&s| (lengths[s], s));
        let max = lengths[*sorted.last().unwrap()] as usize;
        let mut per_len = vec![(0u64, 0usize, 0usize); max + 1];
        let mut code = 0u64;
        let mut idx = 0;
        for (len, slot) in per_len.iter_mut().enumerate().skip(1) {
            let count = sorted[idx..]
                .iter()
                .take_while(|&&s| lengths[s] as usize == len)
                .count();
            *slot = (code, idx, count);
            code = (code + count as u64) << 1;
            idx += count;
        }
        Ok(Self {
            sorted,
            per_len,
            single: None,
        })
    }

    /// Decoder for an alphabet where only `sym` occurs (0-bit code).
    pub fn single(sym: usize) -> Self {
        Self {
            sorted: Vec::new(),
            per_len: Vec::new(),
            single: Some(sym),
        }
    }

    pub fn decode(&self, cur: &mut BitCursor<'_>) -> Result<usize> {
        if let Some(s) = self.single {
            return Ok(s);
        }
        let mut code = 0u64;
        for (first, idx, count) in self.per_len.iter().skip(1) {
            code = (code << 1) | cur.read()? as u64;
            if code >= *first && code - first < *count as u64 {
                return Ok(self.sorted[idx + (code - first) as usize]);
            }
        }
        Err(Error::Integrity("invalid huffman code word".into()))
    }
}

/// Writes `code` (MSB-first, `len` bits).
pub fn push_code(buf: &mut BitBuf, (code, len): (u64, u8)) {
    for k in (0..len).rev() {
        buf.push((code >> k) & 1 == 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_pair_gets_one_bit_each() {
        assert_eq!(code_lengths(&[2, 2]), vec![1, 1]);
        assert_eq!(code_lengths(&[0, 5, 0]), vec![0, 0, 0]);
    }

    #[test]
    fn ties_resolved_by_smallest_symbol() {
        // four equal weights -> all length 2, regardless of order
        assert_eq!(code_lengths(&[1, 1, 1, 1]), vec![2, 2, 2, 2]);
        // a=5 b=2 c=1 d=1 r=2 (abracadabra)
        let l = code_lengths(&[5, 2, 1, 1, 2]);
        let bits: u64 = l.iter().zip([5u64, 2, 1, 1, 2]).map(|(&l, f)| l as u64 * f).sum();
        assert_eq!(bits, 23);
        assert_eq!(l, code_lengths(&[5, 2, 1, 1, 2]));
    }

    proptest! {
        #[test]
        fn canonical_roundtrip(freqs in proptest::collection::vec(0u64..50, 2..40), msg in proptest::collection::vec(0usize..40, 0..200)) {
            let lengths = code_lengths(&freqs);
            let present: Vec<usize> = (0..freqs.len()).filter(|&s| freqs[s] > 0).collect();
            prop_assume!(present.len() >= 2);
            validate_lengths(&lengths).unwrap();
            let codes = canonical_codes(&lengths);
            let syms: Vec<usize> = msg.iter().map(|&m| present[m % present.len()]).collect();
            let mut buf = BitBuf::new();
            for &s in &syms {
                push_code(&mut buf, codes[s]);
            }
            let dec = Decoder::new(&lengths).unwrap();
            let mut cur = buf.reader(0);
            for &s in &syms {
                prop_assert_eq!(dec.decode(&mut cur).unwrap(), s);
            }
        }

        #[test]
        fn huffman_cost_within_entropy_plus_one(freqs in proptest::collection::vec(0u64..1000, 2..64)) {
            let total: u64 = freqs.iter().sum();
            prop_assume!(freqs.iter().filter(|&&f| f > 0).count() >= 2);
            let lengths = code_lengths(&freqs);
            let cost: f64 = freqs.iter().zip(&lengths).map(|(&f, &l)| f as f64 * l as f64).sum();
            let h: f64 = freqs.iter().filter(|&&f| f > 0)
                .map(|&f| f as f64 * (total as f64 / f as f64).log2()).sum();
            prop_assert!(cost <= h + total as f64 + 1e-9);
            prop_assert!(cost + 1e-9 >= h);
        }
    }
}
