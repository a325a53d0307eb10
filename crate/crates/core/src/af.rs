//! Alphabet-friendly FM-index: the BWT cut into context-aligned blocks, each
//! block represented by its own Huffman-shaped wavelet tree.
//!
//! A bitmap `R` marks the first row of every block. Global rank is
//! `C_j[c] + rank_c(s_j, i - start_j + 1)` with `j = rank1(R, i)`.
//!
//! Block boundaries come from a search over uniform context orders
//! `k = 0..=k_max`: at order `k` a new block starts wherever two adjacent
//! sorted suffixes differ within their first `k` symbols. Each candidate is
//! scored with `sum |s_j| H0(s_j) + 2|s_j| + 2 sigma log2 n` after short
//! blocks are merged, and the cheapest wins.

use crate::bits::IntVector;
use crate::bitseq::{BitSeq, DEFAULT_BLOCK_SIZE};
use crate::entropy::weighted_h0;
use crate::error::{Error, Result};
use crate::fm::FmCore;
use crate::index::{IndexKind, IndexParams, LoadContext, SelfIndex, SpaceReport, WalkStats};
use crate::persist::{ByteReader, ByteWriter, Persist};
use crate::sampling::SaSampling;
use crate::text::{lcp_array, BwtText, MappedText, SuffixArray};
use crate::wavelet::{Shape, WaveletTree};
use crate::{RankAccess, Sym};

/// A cut of the BWT into blocks, given by 0-based block start rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub k: usize,
    pub starts: Vec<usize>,
    pub cost: f64,
}

impl Partition {
    pub fn blocks(&self) -> usize {
        self.starts.len()
    }

    /// Block lengths in row order.
    pub fn lengths(&self, n: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.starts.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(&last) = self.starts.last() {
            out.push(n - last);
        }
        out
    }
}

/// Raw order-`k` context boundaries: row `i` starts a block iff its suffix
/// and the previous one share fewer than `k` leading symbols.
pub fn context_partition(lcp: &[usize], k: usize) -> Vec<usize> {
    if lcp.is_empty() {
        return Vec::new();
    }
    let mut starts = vec![0];
    starts.extend((1..lcp.len()).filter(|&i| lcp[i] < k));
    starts
}

/// Merges every block shorter than `min_block` into its successor; a short
/// final block joins its predecessor.
pub fn merge_short(starts: &[usize], n: usize, min_block: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(starts.len());
    let mut open: Option<usize> = None;
    for (j, &s) in starts.iter().enumerate() {
        let begin = open.unwrap_or(s);
        let end = starts.get(j + 1).copied().unwrap_or(n);
        if end - begin >= min_block {
            out.push(begin);
            open = None;
        } else {
            open = Some(begin);
        }
    }
    if open.is_some() && out.is_empty() {
        out.push(0);
    }
    out
}

/// `sum_j |s_j| H0(s_j) + f(|s_j|)` with `f(l) = 2l + 2 sigma log2 n`.
pub fn partition_cost(bwt: &[Sym], sigma: usize, starts: &[usize]) -> f64 {
    let n = bwt.len();
    let per_block = 2.0 * sigma as f64 * (n.max(2) as f64).log2();
    let mut counts = vec![0usize; sigma];
    let mut cost = 0.0;
    for (j, &s) in starts.iter().enumerate() {
        let end = starts.get(j + 1).copied().unwrap_or(n);
        counts.iter_mut().for_each(|x| *x = 0);
        for &c in &bwt[s..end] {
            counts[c as usize] += 1;
        }
        let len = end - s;
        cost += weighted_h0(counts.iter().copied()) + 2.0 * len as f64 + per_block;
    }
    cost
}

/// Scores orders `0..=k_max` and returns every candidate plus the index of
/// the cheapest (the smallest `k` on ties).
pub fn search_partitions(
    bwt: &[Sym],
    sigma: usize,
    lcp: &[usize],
    k_max: usize,
    min_block: usize,
) -> (Vec<Partition>, usize) {
    let n = bwt.len();
    let mut cands = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let starts = merge_short(&context_partition(lcp, k), n, min_block.max(1));
        let cost = partition_cost(bwt, sigma, &starts);
        cands.push(Partition { k, starts, cost });
    }
    let mut best = 0;
    for (i, p) in cands.iter().enumerate() {
        if p.cost < cands[best].cost {
            best = i;
        }
    }
    (cands, best)
}

/// The block-partitioned BWT with global rank and access.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AfBwt {
    n: usize,
    sigma: usize,
    r_map: BitSeq,
    blocks: Vec<WaveletTree>,
    /// `cj[j * sigma + c]` = occurrences of `c` before block `j`.
    cj: IntVector,
}

impl AfBwt {
    pub fn build(bwt: &[Sym], sigma: usize, starts: &[usize]) -> Result<Self> {
        let n = bwt.len();
        if n > 0 && starts.first() != Some(&0) || starts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Param("block starts must begin at 0 and increase".into()));
        }
        let mut is_start = vec![false; n];
        for &s in starts {
            is_start[s] = true;
        }
        let mut blocks = Vec::with_capacity(starts.len());
        let mut running = vec![0u64; sigma];
        let mut cj = Vec::with_capacity(starts.len() * sigma);
        for (j, &s) in starts.iter().enumerate() {
            let end = starts.get(j + 1).copied().unwrap_or(n);
            cj.extend_from_slice(&running);
            for &c in &bwt[s..end] {
                running[c as usize] += 1;
            }
            blocks.push(WaveletTree::build(&bwt[s..end], sigma, Shape::Huffman)?);
        }
        Ok(Self {
            n,
            sigma,
            r_map: BitSeq::build(is_start, DEFAULT_BLOCK_SIZE)?,
            blocks,
            cj: IntVector::from_slice(&cj, n as u64),
        })
    }

    pub fn blocks(&self) -> &[WaveletTree] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn r_map(&self) -> &BitSeq {
        &self.r_map
    }

    /// `C_j[c]` for the 1-based block `j`.
    pub fn block_c(&self, j: usize, c: Sym) -> usize {
        self.cj.get((j - 1) * self.sigma + c as usize) as usize
    }

    /// Block holding row `i` and the row's 1-based offset within it.
    #[inline]
    fn locate_block(&self, i: usize) -> (usize, usize) {
        let j = self.r_map.rank1_unchecked(i);
        let start = self.r_map.select1_unchecked(j);
        (j, i - start + 1)
    }

    /// Bits for the wavelet payloads, then everything else.
    pub fn size(&self) -> (usize, usize) {
        let mut payload = 0;
        let mut overhead = self.r_map.total_bits() + self.cj.size_bits();
        for wt in &self.blocks {
            let s = wt.size();
            payload += s.payload_bits;
            overhead += s.overhead_bits;
        }
        (payload, overhead)
    }
}

impl RankAccess for AfBwt {
    fn len(&self) -> usize {
        self.n
    }

    fn rank(&self, c: Sym, i: usize) -> usize {
        if i == 0 || c as usize >= self.sigma {
            return 0;
        }
        let (j, off) = self.locate_block(i);
        self.block_c(j, c) + self.blocks[j - 1].rank_unchecked(c, off)
    }

    fn access(&self, i: usize) -> Sym {
        let (j, off) = self.locate_block(i);
        self.blocks[j - 1].access_rank_unchecked(off).0
    }

    fn access_rank(&self, i: usize) -> (Sym, usize) {
        let (j, off) = self.locate_block(i);
        let (c, r) = self.blocks[j - 1].access_rank_unchecked(off);
        (c, self.block_c(j, c) + r)
    }
}

impl Persist for AfBwt {
    fn write_to(&self, w: &mut ByteWriter) {
        w.put_usize(self.n);
        w.put_u32(self.sigma as u32);
        self.r_map.write_to(w);
        self.cj.write_to(w);
        w.put_usize(self.blocks.len());
        for b in &self.blocks {
            b.write_to(w);
        }
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let n = r.usize()?;
        let sigma = r.u32()? as usize;
        let r_map = BitSeq::read_from(r)?;
        let cj = IntVector::read_from(r)?;
        let t = r.usize()?;
        if t != r_map.count_ones() || r_map.len() != n || cj.len() != t * sigma {
            return Err(Error::Integrity("AF block table disagrees with R".into()));
        }
        let mut blocks = Vec::with_capacity(t);
        for _ in 0..t {
            blocks.push(WaveletTree::read_from(r)?);
        }
        let out = Self {
            n,
            sigma,
            r_map,
            blocks,
            cj,
        };
        out.check()?;
        Ok(out)
    }
}

impl AfBwt {
    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Integrity(format!("AF blocks: {m}")));
        if self.n > 0 && !self.r_map.get(1) {
            return bad("first row does not open a block");
        }
        for (idx, wt) in self.blocks.iter().enumerate() {
            let j = idx + 1;
            let start = self.r_map.select1_unchecked(j);
            let end = if j < self.blocks.len() {
                self.r_map.select1_unchecked(j + 1)
            } else {
                self.n + 1
            };
            if wt.len() != end - start || wt.sigma() != self.sigma {
                return bad("block length differs from R");
            }
            for c in 0..self.sigma as Sym {
                let next = if j < self.blocks.len() {
                    self.block_c(j + 1, c)
                } else {
                    self.block_c(j, c) + wt.rank_unchecked(c, wt.len())
                };
                if j == 1 && self.block_c(1, c) != 0
                    || next != self.block_c(j, c) + wt.rank_unchecked(c, wt.len())
                {
                    return bad("C_j does not accumulate block counts");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AfIndex {
    alphabet: crate::text::Alphabet,
    params: IndexParams,
    chosen: Partition,
    core: FmCore<AfBwt>,
}

impl AfIndex {
    /// Builds with the partition search over `0..=params.k_max`.
    pub fn build(text: &MappedText, params: &IndexParams) -> Result<Self> {
        Self::build_inner(text, params, None)
    }

    /// Builds at a fixed context order, skipping the search.
    pub fn build_with_order(text: &MappedText, params: &IndexParams, k: usize) -> Result<Self> {
        Self::build_inner(text, params, Some(k))
    }

    fn build_inner(text: &MappedText, params: &IndexParams, order: Option<usize>) -> Result<Self> {
        let sa = SuffixArray::build(text);
        let bwt = BwtText::from_sa(text, &sa);
        let lcp = lcp_array(text.codes(), sa.as_slice());
        let n = bwt.len();
        let chosen = match order {
            Some(k) => {
                let starts = merge_short(&context_partition(&lcp, k), n, params.min_block.max(1));
                let cost = partition_cost(bwt.symbols(), text.sigma(), &starts);
                Partition { k, starts, cost }
            }
            None => {
                let (mut cands, best) = search_partitions(
                    bwt.symbols(),
                    text.sigma(),
                    &lcp,
                    params.k_max,
                    params.min_block,
                );
                cands.swap_remove(best)
            }
        };
        let af = AfBwt::build(bwt.symbols(), text.sigma(), &chosen.starts)?;
        let sampling = SaSampling::build(&sa, params.s_a)?;
        Ok(Self {
            alphabet: text.alphabet().clone(),
            params: *params,
            chosen,
            core: FmCore::new(af, bwt.c_array().to_vec(), sampling),
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.chosen
    }

    pub fn chosen_k(&self) -> usize {
        self.chosen.k
    }

    pub fn blocks(&self) -> &AfBwt {
        self.core.bwt()
    }

    pub fn core(&self) -> &FmCore<AfBwt> {
        &self.core
    }

    /// `rank_c(T^bwt, i)` through the block table.
    pub fn global_rank(&self, c: Sym, i: usize) -> Result<usize> {
        crate::error::check_range("rank position", i, 0, self.core.rows())?;
        Ok(self.core.bwt().rank(c, i))
    }

    pub fn count_range(&self, p: &[Sym]) -> Option<(usize, usize)> {
        self.core.count_range(p)
    }

    pub fn extract_traced(&self, l: usize, r: usize) -> (Vec<Sym>, usize) {
        self.core.extract(l, r)
    }

    pub(crate) fn read_payload(ctx: LoadContext, r: &mut ByteReader<'_>) -> Result<Self> {
        let k = r.usize()?;
        let cost = r.f64()?;
        let core = FmCore::<AfBwt>::read_from(r)?;
        core.check_consistent()?;
        if core.rows() != ctx.text_len + 1 || core.sigma() != ctx.alphabet.sigma() {
            return Err(Error::Integrity("AF payload disagrees with header".into()));
        }
        let rm = core.bwt().r_map();
        let starts = (1..=rm.count_ones()).map(|j| rm.select1_unchecked(j) - 1).collect();
        Ok(Self {
            alphabet: ctx.alphabet,
            params: ctx.params,
            chosen: Partition { k, starts, cost },
            core,
        })
    }
}

impl SelfIndex for AfIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::Af
    }

    fn alphabet(&self) -> &crate::text::Alphabet {
        &self.alphabet
    }

    fn text_len(&self) -> usize {
        self.core.rows() - 1
    }

    fn params(&self) -> IndexParams {
        self.params
    }

    fn count_codes(&self, p: &[Sym]) -> usize {
        self.core.count_range(p).map_or(0, |(sp, ep)| ep - sp + 1)
    }

    fn locate_codes(&self, p: &[Sym]) -> (Vec<usize>, WalkStats) {
        self.core.locate(p)
    }

    fn extract_codes(&self, l: usize, r: usize) -> Vec<Sym> {
        self.core.extract(l, r).0
    }

    fn space(&self) -> SpaceReport {
        let (payload, overhead) = self.core.bwt().size();
        SpaceReport::new(
            payload,
            self.core.sampling().size_bits(),
            overhead + self.core.c_array().len() * 64,
        )
    }

    fn write_payload(&self, w: &mut ByteWriter) {
        w.put_usize(self.chosen.k);
        w.put_f64(self.chosen.cost);
        self.core.write_to(w);
    }
}
