//! Succinct Suffix Array: a Huffman-shaped wavelet tree over the BWT, the C
//! array, and regular suffix-array sampling.

use crate::error::{Error, Result};
use crate::fm::FmCore;
use crate::index::{IndexKind, IndexParams, LoadContext, SelfIndex, SpaceReport, WalkStats};
use crate::persist::{ByteReader, ByteWriter, Persist};
use crate::sampling::SaSampling;
use crate::text::{Alphabet, BwtText, MappedText, SuffixArray};
use crate::wavelet::{Shape, WaveletTree};
use crate::Sym;

#[derive(Debug, Clone)]
pub struct SsaIndex {
    alphabet: Alphabet,
    core: FmCore<WaveletTree>,
}

impl SsaIndex {
    pub fn build(text: &MappedText, s_a: usize) -> Result<Self> {
        let sa = SuffixArray::build(text);
        Self::build_with_sa(text, &sa, s_a)
    }

    pub fn build_with_sa(text: &MappedText, sa: &SuffixArray, s_a: usize) -> Result<Self> {
        let bwt = BwtText::from_sa(text, sa);
        let wt = WaveletTree::build(bwt.symbols(), text.sigma(), Shape::Huffman)?;
        let sampling = SaSampling::build(sa, s_a)?;
        Ok(Self {
            alphabet: text.alphabet().clone(),
            core: FmCore::new(wt, bwt.c_array().to_vec(), sampling),
        })
    }

    pub fn core(&self) -> &FmCore<WaveletTree> {
        &self.core
    }

    pub fn wavelet(&self) -> &WaveletTree {
        self.core.bwt()
    }

    /// 1-based row interval of suffixes prefixed by `p`.
    pub fn count_range(&self, p: &[Sym]) -> Option<(usize, usize)> {
        self.core.count_range(p)
    }

    pub fn extract_traced(&self, l: usize, r: usize) -> (Vec<Sym>, usize) {
        self.core.extract(l, r)
    }

    pub(crate) fn read_payload(ctx: LoadContext, r: &mut ByteReader<'_>) -> Result<Self> {
        let core = FmCore::<WaveletTree>::read_from(r)?;
        core.check_consistent()?;
        if core.rows() != ctx.text_len + 1 || core.sigma() != ctx.alphabet.sigma() {
            return Err(Error::Integrity("SSA payload disagrees with header".into()));
        }
        Ok(Self {
            alphabet: ctx.alphabet,
            core,
        })
    }
}

impl SelfIndex for SsaIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::Ssa
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn text_len(&self) -> usize {
        self.core.rows() - 1
    }

    fn params(&self) -> IndexParams {
        IndexParams {
            s_a: self.core.sampling().s_a(),
            ..IndexParams::default()
        }
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
        let wt = self.wavelet().size();
        SpaceReport::new(
            wt.payload_bits,
            self.core.sampling().size_bits(),
            wt.overhead_bits + self.core.c_array().len() * 64,
        )
    }

    fn write_payload(&self, w: &mut ByteWriter) {
        self.core.write_to(w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ssa(raw: &[u8], s_a: usize) -> SsaIndex {
        SsaIndex::build(&MappedText::new(raw).unwrap(), s_a).unwrap()
    }

    #[test]
    fn abracadabra_queries() {
        let ix = ssa(b"abracadabra", 4);
        let p = ix.alphabet().map_pattern(b"abra").unwrap();
        assert_eq!(ix.count_range(&p), Some((3, 4)));
        assert_eq!(ix.count(b"abra"), 2);
        assert_eq!(ix.locate(b"abra"), vec![1, 8]);
        assert_eq!(ix.locate(b"a"), vec![1, 4, 6, 8, 11]);
        assert_eq!(ix.count(b"q"), 0);
        assert!(ix.locate(b"q").is_empty());
        assert_eq!(ix.extract(1, 4).unwrap(), b"abra");
        assert_eq!(ix.extract(8, 11).unwrap(), b"abra");
        assert_eq!(ix.extract(1, 11).unwrap(), b"abracadabra");
        assert_eq!(ix.extract(5, 100).unwrap(), b"cadabra");
        assert!(ix.extract(0, 3).is_err());
        assert!(ix.extract(5, 4).is_err());
    }

    #[test]
    fn mississippi_ssi() {
        let ix = ssa(b"mississippi", 64);
        assert_eq!(ix.count(b"ssi"), 2);
        assert_eq!(ix.locate(b"ssi"), vec![3, 6]);
    }

    #[test]
    fn full_sampling_needs_no_steps() {
        let ix = ssa(b"abracadabra", 1);
        let (_, stats) = ix.locate_traced(b"a");
        assert_eq!(stats.max_steps, 0);
    }

    #[test]
    fn walk_bounded_by_sampling_rate() {
        let raw: Vec<u8> = (0..3000u32).map(|i| b"acgt"[((i * 7 + i / 13) % 4) as usize]).collect();
        for s_a in [2, 5, 16, 64] {
            let ix = ssa(&raw, s_a);
            for p in [&b"a"[..], b"cg", b"gta"] {
                let (_, stats) = ix.locate_traced(p);
                assert!(stats.max_steps <= s_a, "s_a={s_a} max={}", stats.max_steps);
            }
            for (l, r) in [(1, 1), (17, 90), (2900, 3000)] {
                let (out, steps) = ix.extract_traced(l, r);
                assert_eq!(ix.alphabet().unmap(&out), &raw[l - 1..r]);
                assert!(steps <= s_a + (r - l + 1));
            }
        }
    }

    #[test]
    fn empty_text() {
        let ix = ssa(b"", 4);
        assert_eq!(ix.text_len(), 0);
        assert_eq!(ix.count(b"a"), 0);
        assert!(ix.extract(1, 1).is_err());
    }
}
