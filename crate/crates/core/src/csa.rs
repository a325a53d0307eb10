//! Compressed suffix array: ψ stored differentially with absolute samples,
//! backward search by binary search over ψ, forward locate, and extraction
//! through the first-symbol bitmap `D`.
//!
//! ψ stream format (version [`DELTA_CODE_VERSION`]). Between two absolute
//! samples, each step `d = ψ(i) - ψ(i-1)` is one of three tokens:
//!
//! ```text
//! 0 gamma(r)             r consecutive steps of +1
//! 10 gamma(d - 1)        one positive step d >= 2
//! 11 value[width]        absolute restart (symbol-range boundary)
//! ```

use crate::bits::{bit_width, BitBuf, BitCursor, IntVector};
use crate::bitseq::{BitSeq, DEFAULT_BLOCK_SIZE};
use crate::error::{check_range, Error, Result};
use crate::index::{IndexKind, IndexParams, LoadContext, SelfIndex, SpaceReport, WalkStats};
use crate::persist::{ByteReader, ByteWriter, Persist};
use crate::sampling::SaSampling;
use crate::text::{c_array, Alphabet, MappedText, SuffixArray};
use crate::Sym;

pub const DELTA_CODE_VERSION: u8 = 1;

/// `ψ(i) = A^{-1}[A[i] + 1]` (1-based), wrapping to `A^{-1}[1]` at the row
/// with `A[i] = n`.
pub fn psi_values(sa: &SuffixArray) -> Vec<usize> {
    let inv = sa.inverse();
    let n = sa.len();
    sa.as_slice()
        .iter()
        .map(|&p| inv[(p + 1) % n] + 1)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiArray {
    n: usize,
    s_psi: usize,
    samples: IntVector,
    /// Bit offset of each sample's token run in `stream`.
    offsets: IntVector,
    stream: BitBuf,
}

impl PsiArray {
    pub fn build(psi: &[usize], s_psi: usize) -> Result<Self> {
        if s_psi == 0 {
            return Err(Error::Param("psi sampling period must be >= 1".into()));
        }
        let n = psi.len();
        let width = bit_width(n as u64);
        let mut samples = Vec::with_capacity(n.div_ceil(s_psi));
        let mut offsets = Vec::with_capacity(n.div_ceil(s_psi));
        let mut stream = BitBuf::new();
        for block in psi.chunks(s_psi) {
            samples.push(block[0] as u64);
            offsets.push(stream.len() as u64);
            let mut run = 0u64;
            for w in block.windows(2) {
                if w[1] == w[0] + 1 {
                    run += 1;
                    continue;
                }
                flush_run(&mut stream, &mut run);
                if w[1] > w[0] {
                    stream.push(true);
                    stream.push(false);
                    stream.push_gamma((w[1] - w[0] - 1) as u64);
                } else {
                    stream.push(true);
                    stream.push(true);
                    stream.push_bits(w[1] as u64, width);
                }
            }
            flush_run(&mut stream, &mut run);
        }
        let max_off = stream.len() as u64;
        Ok(Self {
            n,
            s_psi,
            samples: IntVector::from_slice(&samples, n as u64),
            offsets: IntVector::from_slice(&offsets, max_off),
            stream,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn s_psi(&self) -> usize {
        self.s_psi
    }

    /// `ψ(i)`, 1-based, decoding at most `s_psi - 1` steps past a sample.
    pub fn get(&self, i: usize) -> usize {
        debug_assert!(1 <= i && i <= self.n);
        let b = (i - 1) / self.s_psi;
        let mut left = (i - 1) % self.s_psi;
        let mut v = self.samples.get(b) as usize;
        if left == 0 {
            return v;
        }
        let mut cur = self.stream.reader(self.offsets.get(b) as usize);
        let width = bit_width(self.n as u64);
        while left > 0 {
            let (step, take) = read_token(&mut cur, width, left).expect("psi stream");
            v = match step {
                Step::Run => v + take,
                Step::Gap(d) => v + d,
                Step::Abs(a) => a,
            };
            left -= take;
        }
        v
    }

    /// Decodes the whole array (for checks and persistence validation).
    pub fn decode_all(&self) -> Result<Vec<usize>> {
        let width = bit_width(self.n as u64);
        let mut out = Vec::with_capacity(self.n);
        for b in 0..self.samples.len() {
            let mut v = self.samples.get(b) as usize;
            out.push(v);
            let in_block = self.s_psi.min(self.n - b * self.s_psi);
            let mut left = in_block - 1;
            let mut cur = self.stream.reader(self.offsets.get(b) as usize);
            while left > 0 {
                let (step, take) = read_token(&mut cur, width, usize::MAX)?;
                if take > left {
                    return Err(Error::Integrity("psi run crosses a sample".into()));
                }
                for _ in 0..take {
                    v = match step {
                        Step::Run => v + 1,
                        Step::Gap(d) => v + d,
                        Step::Abs(a) => a,
                    };
                    out.push(v);
                }
                left -= take;
            }
        }
        Ok(out)
    }

    pub fn size_bits(&self) -> usize {
        self.stream.len() + self.samples.size_bits() + self.offsets.size_bits()
    }
}

fn flush_run(stream: &mut BitBuf, run: &mut u64) {
    if *run > 0 {
        stream.push(false);
        stream.push_gamma(*run);
        *run = 0;
    }
}

enum Step {
    Run,
    Gap(usize),
    Abs(usize),
}

/// Reads one token; a run is consumed only up to `limit` steps, which is
/// safe for random access because nothing after it is read.
fn read_token(cur: &mut BitCursor<'_>, width: u32, limit: usize) -> Result<(Step, usize)> {
    if !cur.read()? {
        let r = cur.read_gamma()? as usize;
        Ok((Step::Run, r.min(limit)))
    } else if !cur.read()? {
        Ok((Step::Gap(cur.read_gamma()? as usize + 1), 1))
    } else {
        Ok((Step::Abs(cur.read_bits(width)? as usize), 1))
    }
}

impl Persist for PsiArray {
    fn write_to(&self, w: &mut ByteWriter) {
        w.put_usize(self.n);
        w.put_usize(self.s_psi);
        self.samples.write_to(w);
        self.offsets.write_to(w);
        self.stream.write_to(w);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let n = r.usize()?;
        let s_psi = r.usize()?;
        let samples = IntVector::read_from(r)?;
        let offsets = IntVector::read_from(r)?;
        let stream = BitBuf::read_from(r)?;
        if s_psi == 0
            || samples.len() != n.div_ceil(s_psi)
            || offsets.len() != samples.len()
            || offsets.iter().any(|o| o as usize > stream.len())
        {
            return Err(Error::Integrity("psi sample table is inconsistent".into()));
        }
        Ok(Self {
            n,
            s_psi,
            samples,
            offsets,
            stream,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CsaIndex {
    alphabet: Alphabet,
    psi: PsiArray,
    /// 1 at the first row of each symbol's range.
    d_map: BitSeq,
    c: Vec<usize>,
    sampling: SaSampling,
}

impl CsaIndex {
    pub fn build(text: &MappedText, s_a: usize, s_psi: usize) -> Result<Self> {
        let sa = SuffixArray::build(text);
        Self::build_with_sa(text, &sa, s_a, s_psi)
    }

    pub fn build_with_sa(text: &MappedText, sa: &SuffixArray, s_a: usize, s_psi: usize) -> Result<Self> {
        let psi = PsiArray::build(&psi_values(sa), s_psi)?;
        let c = c_array(text.codes(), text.sigma());
        Ok(Self {
            alphabet: text.alphabet().clone(),
            psi,
            d_map: d_bitmap(&c)?,
            c,
            sampling: SaSampling::build(sa, s_a)?,
        })
    }

    pub fn psi(&self) -> &PsiArray {
        &self.psi
    }

    pub fn c_array(&self) -> &[usize] {
        &self.c
    }

    pub fn sampling(&self) -> &SaSampling {
        &self.sampling
    }

    fn rows(&self) -> usize {
        self.psi.len()
    }

    /// First symbol of the suffix at row `i`: `rank1(D, i) - 1` as a code.
    pub fn first_symbol(&self, i: usize) -> Sym {
        (self.d_map.rank1_unchecked(i) - 1) as Sym
    }

    /// Backward search with a binary search over ψ inside each symbol range.
    pub fn count_range(&self, p: &[Sym]) -> Option<(usize, usize)> {
        let sigma = self.c.len() - 1;
        let (&last, rest) = p.split_last()?;
        if last as usize >= sigma {
            return None;
        }
        let (mut sp, mut ep) = (self.c[last as usize] + 1, self.c[last as usize + 1]);
        for &c in rest.iter().rev() {
            if sp > ep {
                return None;
            }
            let c = c as usize;
            if c >= sigma {
                return None;
            }
            let (lo, hi) = (self.c[c] + 1, self.c[c + 1]);
            if lo > hi {
                return None;
            }
            // first j with ψ(j) >= sp, first j with ψ(j) > ep
            let a = lo + partition(hi - lo + 1, |k| self.psi.get(lo + k) < sp);
            let b = lo + partition(hi - lo + 1, |k| self.psi.get(lo + k) <= ep);
            sp = a;
            ep = b - 1;
        }
        (sp <= ep).then_some((sp, ep))
    }

    /// `A[i]` by walking ψ forward to a sampled row; also the step count.
    pub fn locate_row(&self, mut i: usize) -> (usize, usize) {
        let mut t = 0;
        loop {
            if let Some(a) = self.sampling.sample_at(i) {
                return (a - t, t);
            }
            i = self.psi.get(i);
            t += 1;
        }
    }

    /// `T[l..=r]` decoded forward from position `floor(l / s_a) * s_a`.
    pub fn extract_traced(&self, l: usize, r: usize) -> (Vec<Sym>, usize) {
        let s_a = self.sampling.s_a();
        let j = l / s_a;
        let (mut row, mut pos) = if j == 0 {
            // row 1 holds A = n; ψ(1) is the row of position 1
            (self.psi.get(1), 1)
        } else {
            (self.sampling.row_of_sample(j), j * s_a)
        };
        let mut steps = 0;
        while pos < l {
            row = self.psi.get(row);
            pos += 1;
            steps += 1;
        }
        let mut out = Vec::with_capacity(r - l + 1);
        for k in l..=r {
            out.push(self.first_symbol(row));
            if k < r {
                row = self.psi.get(row);
                steps += 1;
            }
        }
        (out, steps)
    }

    pub(crate) fn read_payload(ctx: LoadContext, r: &mut ByteReader<'_>) -> Result<Self> {
        let c = r.usizes()?;
        let psi = PsiArray::read_from(r)?;
        let sampling = SaSampling::read_from(r)?;
        let n = ctx.text_len + 1;
        let ok = c.len() == ctx.alphabet.sigma() + 1
            && c[0] == 0
            && c.windows(2).all(|w| w[0] < w[1])
            && c[c.len() - 1] == n
            && psi.len() == n
            && sampling.mark().len() == n;
        if !ok {
            return Err(Error::Integrity("CSA payload disagrees with header".into()));
        }
        let mut seen = vec![false; n];
        for v in psi.decode_all()? {
            if v == 0 || v > n || std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::Integrity("psi is not a permutation".into()));
            }
        }
        Ok(Self {
            alphabet: ctx.alphabet,
            d_map: d_bitmap(&c)?,
            psi,
            c,
            sampling,
        })
    }
}

fn d_bitmap(c: &[usize]) -> Result<BitSeq> {
    let n = *c.last().unwrap();
    let mut bits = vec![false; n];
    for w in c.windows(2) {
        if w[0] < w[1] {
            bits[w[0]] = true;
        }
    }
    BitSeq::build(bits, DEFAULT_BLOCK_SIZE)
}

/// Smallest `k` in `0..len` with `!pred(k)`, for a predicate that is true
/// on a prefix.
fn partition(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

impl SelfIndex for CsaIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::Csa
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn text_len(&self) -> usize {
        self.rows() - 1
    }

    fn params(&self) -> IndexParams {
        IndexParams {
            s_a: self.sampling.s_a(),
            s_psi: self.psi.s_psi(),
            ..IndexParams::default()
        }
    }

    fn count_codes(&self, p: &[Sym]) -> usize {
        self.count_range(p).map_or(0, |(sp, ep)| ep - sp + 1)
    }

    fn locate_codes(&self, p: &[Sym]) -> (Vec<usize>, WalkStats) {
        let mut stats = WalkStats::default();
        let Some((sp, ep)) = self.count_range(p) else {
            return (Vec::new(), stats);
        };
        let mut out: Vec<usize> = (sp..=ep)
            .map(|i| {
                let (pos, steps) = self.locate_row(i);
                stats.record(steps);
                pos
            })
            .collect();
        out.sort_unstable();
        (out, stats)
    }

    fn extract_codes(&self, l: usize, r: usize) -> Vec<Sym> {
        self.extract_traced(l, r).0
    }

    fn space(&self) -> SpaceReport {
        SpaceReport::new(
            self.psi.size_bits(),
            self.sampling.size_bits(),
            self.d_map.total_bits() + self.c.len() * 64,
        )
    }

    fn write_payload(&self, w: &mut ByteWriter) {
        w.put_usizes(&self.c);
        self.psi.write_to(w);
        self.sampling.write_to(w);
    }
}

impl CsaIndex {
    /// ψ at row `i`, range-checked.
    pub fn psi_at(&self, i: usize) -> Result<usize> {
        check_range("row", i, 1, self.rows())?;
        Ok(self.psi.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn abracadabra_psi() {
        let t = MappedText::new(b"abracadabra").unwrap();
        let sa = SuffixArray::build(&t);
        let psi = psi_values(&sa);
        assert_eq!(psi, vec![4, 1, 7, 8, 9, 10, 11, 12, 6, 3, 2, 5]);
        // strictly increasing inside the 'a' range, rows 2..=6
        assert!(psi[1..6].windows(2).all(|w| w[0] < w[1]));
        for s_psi in [1, 2, 4, 128] {
            let pa = PsiArray::build(&psi, s_psi).unwrap();
            let got: Vec<usize> = (1..=12).map(|i| pa.get(i)).collect();
            assert_eq!(got, psi);
            assert_eq!(pa.decode_all().unwrap(), psi);
        }
        let single = SuffixArray::build(&MappedText::new(b"").unwrap());
        assert_eq!(psi_values(&single), vec![1]);
    }

    #[test]
    fn abracadabra_queries() {
        let t = MappedText::new(b"abracadabra").unwrap();
        let ix = CsaIndex::build(&t, 4, 4).unwrap();
        let enc = |p: &[u8]| t.alphabet().map_pattern(p).unwrap();
        assert_eq!(ix.count_range(&enc(b"abra")), Some((3, 4)));
        assert_eq!(ix.count_range(&enc(b"a")), Some((2, 6)));
        assert_eq!(ix.count(b"qq"), 0);
        assert_eq!(ix.count(b"rr"), 0);
        assert_eq!(ix.locate(b"abra"), vec![1, 8]);
        assert_eq!(t.alphabet().byte(ix.first_symbol(2)), b'a');
        assert_eq!(ix.extract(1, 4).unwrap(), b"abra");
        assert_eq!(ix.extract(1, 11).unwrap(), b"abracadabra");
        assert_eq!(ix.extract(9, 11).unwrap(), b"bra");
        let full = CsaIndex::build(&t, 1, 4).unwrap();
        assert_eq!(full.locate_traced(b"a").1.max_steps, 0);
    }

    #[test]
    fn psi_random_texts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.gen_range(0..600);
            let sigma = [2u8, 4, 16, 96][rng.gen_range(0..4)];
            let raw: Vec<u8> = (0..n).map(|_| 32 + rng.gen_range(0..sigma)).collect();
            let t = MappedText::new(&raw).unwrap();
            let sa = SuffixArray::build(&t);
            let a = sa.to_one_based();
            let psi = psi_values(&sa);
            let inv = sa.inverse();
            for i in 0..psi.len() {
                let want = if a[i] == a.len() { inv[0] + 1 } else { inv[a[i]] + 1 };
                assert_eq!(psi[i], want);
            }
            for s_psi in [16, 64, 128] {
                let pa = PsiArray::build(&psi, s_psi).unwrap();
                assert_eq!(pa.decode_all().unwrap(), psi);
                for i in 1..=psi.len() {
                    assert_eq!(pa.get(i), psi[i - 1]);
                }
            }
        }
    }

    #[test]
    fn extract_steps_bounded() {
        let raw: Vec<u8> = (0..2000u32).map(|i| b"acgt"[((i * i + 3 * i) % 4) as usize]).collect();
        let t = MappedText::new(&raw).unwrap();
        for s_a in [3, 16, 64] {
            let ix = CsaIndex::build(&t, s_a, 32).unwrap();
            for (l, r) in [(1, 5), (63, 200), (1990, 2000)] {
                let (out, steps) = ix.extract_traced(l, r);
                assert_eq!(t.alphabet().unmap(&out), &raw[l - 1..r]);
                assert!(steps <= s_a + r - l + 1);
            }
        }
    }
}
