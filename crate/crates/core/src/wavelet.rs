//! Wavelet trees over dense symbol sequences.
//!
//! Both shapes are a binary code trie: each internal node stores one bit per
//! position of its subsequence, 0 for symbols whose code continues left.
//! The balanced shape splits the symbol range `[lo, hi]` at `(lo + hi) / 2`;
//! the Huffman shape uses canonical Huffman codes of the symbol frequencies,
//! so the stored payload is `sum_c n_c * |code(c)|` bits.

use crate::bitseq::{BitSeq, DEFAULT_BLOCK_SIZE};
use crate::error::{check_range, Error, Result};
use crate::huffman;
use crate::persist::{ByteReader, ByteWriter, Persist};
use crate::{RankAccess, Sym};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Balanced,
    Huffman,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Child {
    Leaf(Sym),
    Node(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    bits: BitSeq,
    child: [Child; 2],
}

/// Space split into stored sequence bits and everything else.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WtSize {
    pub payload_bits: usize,
    pub overhead_bits: usize,
}

impl WtSize {
    pub fn total(&self) -> usize {
        self.payload_bits + self.overhead_bits
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletTree {
    shape: Shape,
    sigma: usize,
    n: usize,
    /// Huffman code lengths (empty for the balanced shape).
    lengths: Vec<u8>,
    codes: Vec<(u64, u8)>,
    root: Option<Child>,
    nodes: Vec<Node>,
}

impl WaveletTree {
    pub fn build(seq: &[Sym], sigma: usize, shape: Shape) -> Result<Self> {
        if sigma == 0 || sigma > Sym::MAX as usize + 1 {
            return Err(Error::Param(format!("alphabet size {sigma}")));
        }
        let mut freqs = vec![0u64; sigma];
        for &s in seq {
            let s = s as usize;
            if s >= sigma {
                return Err(Error::Symbol { symbol: s, sigma });
            }
            freqs[s] += 1;
        }
        let (lengths, codes, root_leaf) = match shape {
            Shape::Balanced => (Vec::new(), balanced_codes(sigma), (sigma == 1).then_some(0)),
            Shape::Huffman => {
                let lengths = huffman::code_lengths(&freqs);
                let codes = huffman::canonical_codes(&lengths);
                let present: Vec<usize> = (0..sigma).filter(|&s| freqs[s] > 0).collect();
                let leaf = (present.len() == 1).then(|| present[0] as Sym);
                (lengths, codes, leaf)
            }
        };
        let mut wt = Self::skeleton(shape, sigma, seq.len(), lengths, codes, root_leaf);
        if let Some(Child::Node(0)) = wt.root {
            let mut bitmaps = vec![Vec::new(); wt.nodes.len()];
            wt.distribute(0, seq.to_vec(), 0, &mut bitmaps);
            for (node, bits) in wt.nodes.iter_mut().zip(bitmaps) {
                node.bits = BitSeq::build(bits, DEFAULT_BLOCK_SIZE)?;
            }
        }
        Ok(wt)
    }

    /// Tree structure with empty bitmaps, derived from the codebook alone.
    fn skeleton(
        shape: Shape,
        sigma: usize,
        n: usize,
        lengths: Vec<u8>,
        codes: Vec<(u64, u8)>,
        root_leaf: Option<Sym>,
    ) -> Self {
        let mut wt = Self {
            shape,
            sigma,
            n,
            lengths,
            codes,
            root: None,
            nodes: Vec::new(),
        };
        if let Some(s) = root_leaf {
            wt.root = Some(Child::Leaf(s));
            return wt;
        }
        let mut syms: Vec<usize> = (0..sigma).filter(|&s| wt.codes[s].1 > 0).collect();
        if syms.is_empty() {
            return wt;
        }
        syms.sort_by_key(|&s| path_key(wt.codes[s]));
        let root = wt.make_node(&syms, 0);
        wt.root = Some(root);
        wt
    }

    fn make_node(&mut self, syms: &[usize], depth: u8) -> Child {
        if syms.len() == 1 && self.codes[syms[0]].1 == depth {
            return Child::Leaf(syms[0] as Sym);
        }
        let split = syms.partition_point(|&s| code_bit(self.codes[s], depth) == 0);
        let idx = self.nodes.len();
        self.nodes.push(Node {
            bits: BitSeq::from_bools(&[]),
            child: [Child::Leaf(0); 2],
        });
        let left = self.make_node(&syms[..split], depth + 1);
        let right = self.make_node(&syms[split..], depth + 1);
        self.nodes[idx].child = [left, right];
        Child::Node(idx as u32)
    }

    fn distribute(&self, node: usize, seq: Vec<Sym>, depth: u8, out: &mut [Vec<bool>]) {
        let mut halves: [Vec<Sym>; 2] = [Vec::new(), Vec::new()];
        let mut bits = Vec::with_capacity(seq.len());
        for s in seq {
            let b = code_bit(self.codes[s as usize], depth) as usize;
            bits.push(b == 1);
            halves[b].push(s);
        }
        out[node] = bits;
        let [left, right] = halves;
        for (side, part) in [left, right].into_iter().enumerate() {
            if let Child::Node(k) = self.nodes[node].child[side] {
                self.distribute(k as usize, part, depth + 1, out);
            }
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Code length of `c` (0 if absent or if the tree is a single leaf).
    pub fn code_len(&self, c: Sym) -> u8 {
        self.codes.get(c as usize).map_or(0, |x| x.1)
    }

    pub fn height(&self) -> usize {
        self.codes.iter().map(|c| c.1 as usize).max().unwrap_or(0)
    }

    /// Root bitmap as bools, for inspection.
    pub fn root_bits(&self) -> Vec<bool> {
        match self.root {
            Some(Child::Node(k)) => self.nodes[k as usize].bits.iter().collect(),
            _ => Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Occurrences of `c` in positions `1..=i`. Symbols absent from the
    /// sequence have rank 0 everywhere.
    pub fn rank(&self, c: Sym, i: usize) -> Result<usize> {
        check_range("rank position", i, 0, self.n)?;
        Ok(self.rank_unchecked(c, i))
    }

    #[inline]
    pub fn rank_unchecked(&self, c: Sym, mut i: usize) -> usize {
        let mut child = match self.root {
            None => return 0,
            Some(Child::Leaf(s)) => return if s == c { i } else { 0 },
            Some(r) => r,
        };
        let Some(&code) = self.codes.get(c as usize) else {
            return 0;
        };
        if code.1 == 0 {
            return 0;
        }
        let mut depth = 0;
        while let Child::Node(k) = child {
            if i == 0 {
                return 0;
            }
            let node = &self.nodes[k as usize];
            let b = code_bit(code, depth);
            i = if b == 1 {
                node.bits.rank1_unchecked(i)
            } else {
                node.bits.rank0_unchecked(i)
            };
            child = node.child[b as usize];
            depth += 1;
        }
        i
    }

    pub fn access(&self, i: usize) -> Result<Sym> {
        check_range("position", i, 1, self.n)?;
        Ok(self.access_rank_unchecked(i).0)
    }

    /// Symbol at `i` and its rank up to `i`, in a single descent.
    #[inline]
    pub fn access_rank_unchecked(&self, mut i: usize) -> (Sym, usize) {
        let mut child = self.root.expect("access on empty wavelet tree");
        loop {
            match child {
                Child::Leaf(s) => return (s, i),
                Child::Node(k) => {
                    let node = &self.nodes[k as usize];
                    let b = node.bits.get(i);
                    i = if b {
                        node.bits.rank1_unchecked(i)
                    } else {
                        node.bits.rank0_unchecked(i)
                    };
                    child = node.child[b as usize];
                }
            }
        }
    }

    pub fn size(&self) -> WtSize {
        let mut s = WtSize::default();
        for node in &self.nodes {
            let (payload, dir) = node.bits.size_bits();
            s.payload_bits += payload;
            // rank directory plus two child links
            s.overhead_bits += dir + 64;
        }
        s.overhead_bits += self.codebook_bits();
        s
    }

    /// Bits to store the codebook: one byte per code length (Huffman only).
    pub fn codebook_bits(&self) -> usize {
        self.lengths.len() * 8
    }
}

impl RankAccess for WaveletTree {
    fn len(&self) -> usize {
        self.n
    }

    fn rank(&self, c: Sym, i: usize) -> usize {
        self.rank_unchecked(c, i)
    }

    fn access(&self, i: usize) -> Sym {
        self.access_rank_unchecked(i).0
    }

    fn access_rank(&self, i: usize) -> (Sym, usize) {
        self.access_rank_unchecked(i)
    }
}

#[inline]
fn code_bit((code, len): (u64, u8), depth: u8) -> u64 {
    (code >> (len - 1 - depth)) & 1
}

/// Sort key placing codes in trie preorder (left-aligned code value).
fn path_key((code, len): (u64, u8)) -> (u64, u8) {
    (code << (64 - len as u32), len)
}

fn balanced_codes(sigma: usize) -> Vec<(u64, u8)> {
    fn walk(lo: usize, hi: usize, code: u64, len: u8, out: &mut [(u64, u8)]) {
        if lo == hi {
            out[lo] = (code, len);
            return;
        }
        let mid = (lo + hi) / 2;
        walk(lo, mid, code << 1, len + 1, out);
        walk(mid + 1, hi, (code << 1) | 1, len + 1, out);
    }
    let mut out = vec![(0, 0); sigma];
    walk(0, sigma - 1, 0, 0, &mut out);
    out
}

impl Persist for WaveletTree {
    fn write_to(&self, w: &mut ByteWriter) {
        w.put_u8(match self.shape {
            Shape::Balanced => 0,
            Shape::Huffman => 1,
        });
        w.put_u32(self.sigma as u32);
        w.put_u64(self.n as u64);
        if self.shape == Shape::Huffman {
            w.put_raw(&self.lengths);
        }
        match self.root {
            Some(Child::Leaf(s)) => {
                w.put_u8(1);
                w.put_u16(s);
            }
            _ => {
                w.put_u8(0);
                w.put_u16(0);
            }
        }
        w.put_u64(self.nodes.len() as u64);
        for node in &self.nodes {
            node.bits.write_to(w);
        }
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let shape = match r.u8()? {
            0 => Shape::Balanced,
            1 => Shape::Huffman,
            t => return Err(Error::Integrity(format!("wavelet shape tag {t}"))),
        };
        let sigma = r.u32()? as usize;
        let n = r.usize()?;
        if sigma == 0 || sigma > Sym::MAX as usize + 1 {
            return Err(Error::Integrity(format!("wavelet alphabet size {sigma}")));
        }
        let (lengths, codes) = match shape {
            Shape::Balanced => (Vec::new(), balanced_codes(sigma)),
            Shape::Huffman => {
                let lengths = r.raw(sigma)?.to_vec();
                huffman::validate_lengths(&lengths)?;
                let codes = huffman::canonical_codes(&lengths);
                (lengths, codes)
            }
        };
        let leaf_tag = r.u8()?;
        let leaf_sym = r.u16()?;
        let root_leaf = match (leaf_tag, shape) {
            (1, _) if (leaf_sym as usize) < sigma => Some(leaf_sym),
            (0, Shape::Balanced) if sigma == 1 => {
                return Err(Error::Integrity("unary balanced tree without leaf".into()))
            }
            (0, _) => None,
            _ => return Err(Error::Integrity("wavelet root tag".into())),
        };
        let mut wt = Self::skeleton(shape, sigma, n, lengths, codes, root_leaf);
        let count = r.usize()?;
        if count != wt.nodes.len() {
            return Err(Error::Integrity(format!(
                "wavelet node count {count}, codebook implies {}",
                wt.nodes.len()
            )));
        }
        for k in 0..count {
            wt.nodes[k].bits = BitSeq::read_from(r)?;
        }
        wt.check_lengths()?;
        Ok(wt)
    }
}

impl WaveletTree {
    /// Every bitmap length must equal the zeros/ones routed from its parent.
    fn check_lengths(&self) -> Result<()> {
        let mut expected = vec![usize::MAX; self.nodes.len()];
        match self.root {
            Some(Child::Node(0)) => expected[0] = self.n,
            None if self.n != 0 => return Err(Error::Integrity("empty wavelet tree with n > 0".into())),
            _ => return Ok(()),
        }
        for (k, node) in self.nodes.iter().enumerate() {
            if node.bits.len() != expected[k] {
                return Err(Error::Integrity(format!("wavelet node {k} has wrong length")));
            }
            let ones = node.bits.count_ones();
            for (side, cnt) in [(0, node.bits.len() - ones), (1, ones)] {
                if let Child::Node(c) = node.child[side] {
                    expected[c as usize] = cnt;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn codes_of(s: &str) -> (Vec<Sym>, Vec<u8>) {
        let mut alpha: Vec<u8> = s.bytes().collect();
        alpha.sort_unstable();
        alpha.dedup();
        let seq = s
            .bytes()
            .map(|b| alpha.iter().position(|&a| a == b).unwrap() as Sym)
            .collect();
        (seq, alpha)
    }

    fn scan_rank(seq: &[Sym], c: Sym, i: usize) -> usize {
        seq[..i].iter().filter(|&&s| s == c).count()
    }

    #[test]
    fn unary_alphabet_has_no_bitmaps() {
        for shape in [Shape::Balanced, Shape::Huffman] {
            let wt = WaveletTree::build(&[0, 0, 0, 0], 1, shape).unwrap();
            assert_eq!(wt.size().payload_bits, 0);
            assert_eq!(wt.node_count(), 0);
            assert_eq!(wt.rank(0, 3).unwrap(), 3);
            assert_eq!(wt.access(4).unwrap(), 0);
        }
    }

    #[test]
    fn abracadabra_balanced_root() {
        let (seq, alpha) = codes_of("abracadabra");
        assert_eq!(alpha, b"abcdr");
        let wt = WaveletTree::build(&seq, 5, Shape::Balanced).unwrap();
        let root: String = wt.root_bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
        assert_eq!(root, "00100010010");
        assert_eq!(wt.height(), 3);
        // oracle: sum of node lengths = sum over positions of code length
        let oracle: usize = seq.iter().map(|&s| wt.code_len(s) as usize).sum();
        assert_eq!(wt.size().payload_bits, oracle);
    }

    #[test]
    fn abracadabra_rank_access() {
        let (seq, _) = codes_of("abracadabra");
        for shape in [Shape::Balanced, Shape::Huffman] {
            let wt = WaveletTree::build(&seq, 5, shape).unwrap();
            // 'a' = 0, 'r' = 4
            assert_eq!(wt.rank(0, 11).unwrap(), scan_rank(&seq, 0, 11));
            assert_eq!(wt.rank(0, 11).unwrap(), 5);
            assert_eq!(wt.rank(4, 3).unwrap(), 1);
            assert_eq!(wt.rank(2, 0).unwrap(), 0);
            assert_eq!(wt.access(1).unwrap(), 0);
            assert_eq!(wt.access(3).unwrap(), 4);
            assert!(wt.access(12).is_err());
            assert!(wt.rank(0, 12).is_err());
        }
        let z = WaveletTree::build(&[0], 1, Shape::Huffman).unwrap();
        assert_eq!(z.access(1).unwrap(), 0);
    }

    #[test]
    fn aabb_huffman_single_node() {
        let wt = WaveletTree::build(&[0, 0, 1, 1], 2, Shape::Huffman).unwrap();
        assert_eq!(wt.node_count(), 1);
        assert_eq!(wt.size().payload_bits, 4);
    }

    #[test]
    fn rejects_out_of_range_symbol() {
        assert!(matches!(
            WaveletTree::build(&[0, 3], 3, Shape::Balanced),
            Err(Error::Symbol { symbol: 3, sigma: 3 })
        ));
    }

    #[test]
    fn huffman_not_worse_than_balanced_on_skew() {
        let mut seq = vec![0 as Sym; 900];
        seq.extend((0..100).map(|i| (i % 15 + 1) as Sym));
        let b = WaveletTree::build(&seq, 16, Shape::Balanced).unwrap();
        let h = WaveletTree::build(&seq, 16, Shape::Huffman).unwrap();
        assert!(h.size().payload_bits <= b.size().payload_bits);
    }

    fn h0_bits(seq: &[Sym], sigma: usize) -> f64 {
        let mut f = vec![0usize; sigma];
        for &s in seq {
            f[s as usize] += 1;
        }
        let n = seq.len() as f64;
        f.iter()
            .filter(|&&c| c > 0)
            .map(|&c| c as f64 * (n / c as f64).log2())
            .sum()
    }

    proptest! {
        #[test]
        fn shapes_agree_with_scan(seq in proptest::collection::vec(0u16..12, 0..400), sigma_extra in 0usize..4) {
            let sigma = 12 + sigma_extra;
            let b = WaveletTree::build(&seq, sigma, Shape::Balanced).unwrap();
            let h = WaveletTree::build(&seq, sigma, Shape::Huffman).unwrap();
            let n = seq.len();
            let mut total = 0;
            for c in 0..sigma as Sym {
                let mut acc = 0;
                for i in 0..=n {
                    if i > 0 && seq[i - 1] == c { acc += 1; }
                    prop_assert_eq!(b.rank_unchecked(c, i), acc);
                    prop_assert_eq!(h.rank_unchecked(c, i), acc);
                }
                total += acc;
            }
            prop_assert_eq!(total, n);
            for i in 1..=n {
                prop_assert_eq!(b.access(i).unwrap(), seq[i - 1]);
                prop_assert_eq!(h.access_rank_unchecked(i), (seq[i - 1], scan_rank(&seq, seq[i - 1], i)));
            }
            prop_assert!(h.size().payload_bits as f64 <= h0_bits(&seq, sigma) + n as f64 + 1e-9);
        }

        #[test]
        fn persist_roundtrip(seq in proptest::collection::vec(0u16..7, 0..300), huff in any::<bool>()) {
            let shape = if huff { Shape::Huffman } else { Shape::Balanced };
            let wt = WaveletTree::build(&seq, 7, shape).unwrap();
            let mut w = ByteWriter::new();
            wt.write_to(&mut w);
            let bytes = w.into_inner();
            let back = WaveletTree::read_from(&mut ByteReader::new(&bytes)).unwrap();
            prop_assert_eq!(back, wt);
        }
    }
}
