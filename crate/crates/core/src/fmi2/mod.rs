//! FM-index with bucketed compression and special-symbol text marking.
//!
//! The text is indexed with a special symbol inserted after every `s_a`-th
//! original symbol. Codes in the marked text: terminator 0, special 1,
//! original code `c` becomes `c + 1`. Rows whose suffix starts with the
//! special symbol are contiguous, and the text position of each such special
//! is stored in row order, which is all locate needs.
//!
//! The BWT is cut into buckets of `lb` symbols, grouped `lsb` to a
//! superbucket. `T_sb` holds absolute ranks at superbucket starts (u32),
//! `T_b` ranks relative to the enclosing superbucket (u16); one extra entry
//! covers the end of the sequence. Buckets are compressed with
//! [`bucket::encode`].

pub mod bucket;

use crate::bits::{bit_width, BitBuf, IntVector};
use crate::error::{check_range, Error, Result};
use crate::index::{IndexKind, IndexParams, LoadContext, SelfIndex, SpaceReport, WalkStats};
use crate::persist::{ByteReader, ByteWriter, Persist};
use crate::text::{c_array, suffix_array, Alphabet, MappedText, TERMINATOR};
use crate::Sym;

pub const SPECIAL: Sym = 1;

/// Marked text: a special after every `s_a`-th symbol of `raw` (original
/// codes, terminator last), remapped as described in the module docs.
pub fn mark_text(codes: &[Sym], s_a: usize) -> Result<Vec<Sym>> {
    if s_a < 2 {
        return Err(Error::Param("fmi2 needs s_a >= 2".into()));
    }
    let (&last, body) = codes.split_last().ok_or_else(|| Error::Param("empty text".into()))?;
    if last != TERMINATOR || body.contains(&TERMINATOR) {
        return Err(Error::Integrity("text must end with a single terminator".into()));
    }
    let mut out = Vec::with_capacity(codes.len() + body.len() / s_a);
    for (i, &c) in body.iter().enumerate() {
        out.push(c + 1);
        if (i + 1) % s_a == 0 {
            out.push(SPECIAL);
        }
    }
    out.push(TERMINATOR);
    Ok(out)
}

/// Marked-text position (1-based, not a special) to original position.
#[inline]
pub fn unmark_position(q: usize, s_a: usize) -> usize {
    q - (q - 1) / (s_a + 1)
}

/// Pattern variants that can match an occurrence in the marked text: the
/// pattern itself and, for each first-mark offset `q` in
/// `1..=min(m - 1, s_a)`, the pattern with specials after symbols
/// `q, q + s_a, ...` (all before the last symbol). Input and output use
/// marked codes.
pub fn variants(p: &[Sym], s_a: usize) -> Vec<Vec<Sym>> {
    let m = p.len();
    let mut out = vec![p.to_vec()];
    for q in 1..=m.saturating_sub(1).min(s_a) {
        let mut v = Vec::with_capacity(m + m / s_a + 1);
        for (i, &c) in p.iter().enumerate() {
            v.push(c);
            let k = i + 1;
            if k < m && k >= q && (k - q) % s_a == 0 {
                v.push(SPECIAL);
            }
        }
        out.push(v);
    }
    out
}

#[derive(Debug, Clone)]
pub struct Fmi2Index {
    alphabet: Alphabet,
    s_a: usize,
    lb: usize,
    lsb: usize,
    /// Original text length (no specials, no terminator).
    n0: usize,
    /// Marked length including the terminator.
    n: usize,
    sigma: usize,
    c: Vec<usize>,
    tsb: Vec<u32>,
    tb: Vec<u16>,
    offsets: IntVector,
    stream: BitBuf,
    /// Marked-text positions of specials, in the order of their rows.
    marked_positions: IntVector,
    /// `special_rows[j - 1]` = row whose suffix starts at the `j`-th special.
    special_rows: Vec<usize>,
}

impl Fmi2Index {
    pub fn build(text: &MappedText, params: &IndexParams) -> Result<Self> {
        let (s_a, lb, lsb) = (params.s_a, params.lb, params.lsb);
        if lb == 0 || lsb == 0 || (lsb - 1) * lb > u16::MAX as usize {
            return Err(Error::Param(format!(
                "fmi2 needs lb >= 1, lsb >= 1 and (lsb - 1) * lb <= 65535 (lb={lb}, lsb={lsb})"
            )));
        }
        let marked = mark_text(text.codes(), s_a)?;
        let n = marked.len();
        if n > u32::MAX as usize {
            return Err(Error::Param("text too long for 32-bit superbucket ranks".into()));
        }
        let sigma = text.sigma() + 1;
        let sa = suffix_array(&marked);
        let bwt: Vec<Sym> = sa
            .iter()
            .map(|&p| marked[if p == 0 { n - 1 } else { p - 1 }])
            .collect();
        let c = c_array(&marked, sigma);

        let width = sym_width(sigma);
        let nb = n.div_ceil(lb);
        let mut tsb = Vec::new();
        let mut tb = Vec::with_capacity((nb + 1) * sigma);
        let mut running = vec![0u32; sigma];
        let mut stream = BitBuf::new();
        let mut offsets = Vec::with_capacity(nb);
        for b in 0..=nb {
            if b % lsb == 0 {
                tsb.extend_from_slice(&running);
            }
            let base = &tsb[(b / lsb) * sigma..];
            tb.extend((0..sigma).map(|x| (running[x] - base[x]) as u16));
            if b < nb {
                let chunk = &bwt[b * lb..((b + 1) * lb).min(n)];
                offsets.push(stream.len() as u64);
                bucket::encode(chunk, width, &mut stream);
                for &s in chunk {
                    running[s as usize] += 1;
                }
            }
        }
        let specials = c[SPECIAL as usize + 1] - c[SPECIAL as usize];
        let positions: Vec<usize> = (0..specials)
            .map(|k| sa[c[SPECIAL as usize] + k] + 1)
            .collect();
        let max_off = stream.len() as u64;
        let mut ix = Self {
            alphabet: text.alphabet().clone(),
            s_a,
            lb,
            lsb,
            n0: text.raw_len(),
            n,
            sigma,
            c,
            tsb,
            tb,
            offsets: IntVector::from_slice(&offsets, max_off),
            stream,
            marked_positions: IntVector::from_usizes(&positions, n),
            special_rows: Vec::new(),
        };
        ix.special_rows = ix.derive_special_rows()?;
        Ok(ix)
    }

    pub fn special_code(&self) -> u16 {
        SPECIAL
    }

    pub fn s_a(&self) -> usize {
        self.s_a
    }

    /// Number of rows (marked length including the terminator).
    pub fn rows(&self) -> usize {
        self.n
    }

    /// Row range `[sp, ep]` of suffixes starting with the special symbol.
    pub fn special_rows_range(&self) -> (usize, usize) {
        (self.c[SPECIAL as usize] + 1, self.c[SPECIAL as usize + 1])
    }

    fn derive_special_rows(&self) -> Result<Vec<usize>> {
        let count = self.marked_positions.len();
        if count != self.n0 / self.s_a {
            return Err(Error::Integrity("special count disagrees with s_a".into()));
        }
        let mut rows = vec![0usize; count];
        let first = self.c[SPECIAL as usize] + 1;
        for (k, q) in self.marked_positions.iter().enumerate() {
            let q = q as usize;
            let j = q / (self.s_a + 1);
            if !q.is_multiple_of(self.s_a + 1) || j == 0 || j > count || rows[j - 1] != 0 {
                return Err(Error::Integrity("bad special position".into()));
            }
            rows[j - 1] = first + k;
        }
        Ok(rows)
    }

    fn decode_bucket(&self, b: usize, out: &mut Vec<Sym>) {
        let len = self.lb.min(self.n - b * self.lb);
        let mut cur = self.stream.reader(self.offsets.get(b) as usize);
        bucket::decode(&mut cur, sym_width(self.sigma), len, self.sigma, out)
            .expect("bucket stream validated at build/load");
    }

    #[inline]
    fn table_rank(&self, b: usize, c: usize) -> usize {
        self.tsb[(b / self.lsb) * self.sigma + c] as usize + self.tb[b * self.sigma + c] as usize
    }

    /// Occurrences of marked code `c` in `bwt[1..=i]`.
    pub fn rank(&self, c: Sym, i: usize) -> usize {
        let c = c as usize;
        if c >= self.sigma {
            return 0;
        }
        let (b, off) = (i / self.lb, i % self.lb);
        let base = self.table_rank(b, c);
        if off == 0 {
            return base;
        }
        let mut buf = Vec::with_capacity(self.lb);
        self.decode_bucket(b, &mut buf);
        base + buf[..off].iter().filter(|&&s| s as usize == c).count()
    }

    /// Range-checked [`Fmi2Index::rank`].
    pub fn bucket_rank(&self, c: Sym, i: usize) -> Result<usize> {
        check_range("rank position", i, 0, self.n)?;
        Ok(self.rank(c, i))
    }

    /// `bwt[i]` and its rank at `i`.
    pub fn access_rank(&self, i: usize) -> (Sym, usize) {
        let (b, off) = ((i - 1) / self.lb, (i - 1) % self.lb);
        let mut buf = Vec::with_capacity(self.lb);
        self.decode_bucket(b, &mut buf);
        let c = buf[off];
        let r = self.table_rank(b, c as usize) + buf[..=off].iter().filter(|&&s| s == c).count();
        (c, r)
    }

    /// The BWT of the marked text, decompressed.
    pub fn bwt(&self) -> Vec<Sym> {
        let mut out = Vec::with_capacity(self.n);
        let mut buf = Vec::new();
        for b in 0..self.offsets.len() {
            self.decode_bucket(b, &mut buf);
            out.extend_from_slice(&buf);
        }
        out
    }

    fn lf(&self, i: usize) -> (Sym, usize) {
        let (c, r) = self.access_rank(i);
        (c, self.c[c as usize] + r)
    }

    fn backward_search(&self, p: &[Sym]) -> Option<(usize, usize)> {
        let (mut sp, mut ep) = (1, self.n);
        for &c in p.iter().rev() {
            let cu = c as usize;
            if cu >= self.sigma || self.c[cu] == self.c[cu + 1] {
                return None;
            }
            sp = self.c[cu] + self.rank(c, sp - 1) + 1;
            ep = self.c[cu] + self.rank(c, ep);
            if sp > ep {
                return None;
            }
        }
        Some((sp, ep))
    }

    /// One row range per variant that occurs; `p` in original codes.
    pub fn count_ranges(&self, p: &[Sym]) -> Vec<(usize, usize)> {
        if p.is_empty() || p.contains(&TERMINATOR) {
            return Vec::new();
        }
        let shifted: Vec<Sym> = p.iter().map(|&c| c + 1).collect();
        variants(&shifted, self.s_a)
            .iter()
            .filter_map(|v| self.backward_search(v))
            .collect()
    }

    /// Resolves rows in phases. Phase `t` holds row ranges whose suffixes
    /// start `t` symbols before the occurrences; a range splits by the
    /// distinct BWT symbols it contains, and rows reached through a special
    /// or the terminator are resolved.
    pub fn locate_ranges(&self, ranges: &[(usize, usize)]) -> (Vec<usize>, WalkStats) {
        let mut stats = WalkStats::default();
        let mut out = Vec::new();
        let mut current: Vec<(usize, usize)> = ranges.to_vec();
        let mut seen = vec![false; self.sigma];
        let mut buf = Vec::new();
        let first_special = self.c[SPECIAL as usize] + 1;
        let mut t = 0;
        while !current.is_empty() {
            let mut next = Vec::new();
            for &(sp, ep) in &current {
                let mut distinct = Vec::new();
                self.symbols_in(sp, ep, &mut buf);
                for &s in &buf {
                    if !std::mem::replace(&mut seen[s as usize], true) {
                        distinct.push(s);
                    }
                }
                distinct.sort_unstable();
                for &c in &distinct {
                    seen[c as usize] = false;
                    let cu = c as usize;
                    let nsp = self.c[cu] + self.rank(c, sp - 1) + 1;
                    let nep = self.c[cu] + self.rank(c, ep);
                    match c {
                        SPECIAL => {
                            for row in nsp..=nep {
                                let q = self.marked_positions.get(row - first_special) as usize;
                                out.push(unmark_position(q + 1 + t, self.s_a));
                                stats.record(t + 1);
                            }
                        }
                        TERMINATOR => {
                            out.push(unmark_position(1 + t, self.s_a));
                            stats.record(t + 1);
                        }
                        _ => next.push((nsp, nep)),
                    }
                }
            }
            current = next;
            t += 1;
        }
        out.sort_unstable();
        let before = out.len();
        out.dedup();
        stats.duplicates = before - out.len();
        (out, stats)
    }

    /// `bwt[sp..=ep]` into `out`.
    fn symbols_in(&self, sp: usize, ep: usize, out: &mut Vec<Sym>) {
        out.clear();
        let mut buf = Vec::with_capacity(self.lb);
        let (b0, b1) = ((sp - 1) / self.lb, (ep - 1) / self.lb);
        for b in b0..=b1 {
            self.decode_bucket(b, &mut buf);
            let lo = if b == b0 { (sp - 1) % self.lb } else { 0 };
            let hi = if b == b1 { (ep - 1) % self.lb + 1 } else { buf.len() };
            out.extend_from_slice(&buf[lo..hi]);
        }
    }

    /// Original `T[l..=r]` (codes), walking back from the first special
    /// after position `r`, or from the terminator row. Also the LF-steps.
    pub fn extract_traced(&self, l: usize, r: usize) -> (Vec<Sym>, usize) {
        let j = r.div_ceil(self.s_a);
        let (mut row, mut m) = if j * self.s_a <= self.n0 {
            (self.special_rows[j - 1], j * (self.s_a + 1))
        } else {
            (1, self.n)
        };
        let mut out = Vec::with_capacity(r - l + 1);
        let mut steps = 0;
        loop {
            let (c, next) = self.lf(row);
            steps += 1;
            row = next;
            m -= 1;
            if c == SPECIAL {
                continue;
            }
            let pos = unmark_position(m, self.s_a);
            if pos <= r {
                out.push(c - 1);
            }
            if pos == l {
                break;
            }
        }
        out.reverse();
        (out, steps)
    }

    pub(crate) fn read_payload(ctx: LoadContext, r: &mut ByteReader<'_>) -> Result<Self> {
        let s_a = r.usize()?;
        let lb = r.usize()?;
        let lsb = r.usize()?;
        let n = r.usize()?;
        let c = r.usizes()?;
        let tsb = r.u32s()?;
        let tb = r.u16s()?;
        let offsets = IntVector::read_from(r)?;
        let stream = BitBuf::read_from(r)?;
        let marked_positions = IntVector::read_from(r)?;
        let sigma = ctx.alphabet.sigma() + 1;
        let n0 = ctx.text_len;
        let bad = |m: &str| Error::Integrity(format!("fmi2 payload: {m}"));
        if s_a < 2 || lb == 0 || lsb == 0 || (lsb - 1).saturating_mul(lb) > u16::MAX as usize {
            return Err(bad("parameters"));
        }
        if n != n0 + 1 + n0 / s_a {
            return Err(bad("marked length"));
        }
        let nb = n.div_ceil(lb);
        let ok = c.len() == sigma + 1
            && c[0] == 0
            && c.windows(2).all(|w| w[0] <= w[1])
            && c[sigma] == n
            && c[1] == 1
            && tb.len() == (nb + 1) * sigma
            && tsb.len() == (nb / lsb + 1) * sigma
            && offsets.len() == nb
            && offsets.iter().all(|o| o as usize <= stream.len());
        if !ok {
            return Err(bad("tables"));
        }
        let mut ix = Self {
            alphabet: ctx.alphabet,
            s_a,
            lb,
            lsb,
            n0,
            n,
            sigma,
            c,
            tsb,
            tb,
            offsets,
            stream,
            marked_positions,
            special_rows: Vec::new(),
        };
        let (sp, ep) = ix.special_rows_range();
        if ep + 1 - sp != ix.marked_positions.len() {
            return Err(bad("special rows"));
        }
        ix.special_rows = ix.derive_special_rows()?;
        ix.check_buckets()?;
        Ok(ix)
    }

    /// Decodes every bucket and checks it against the rank tables.
    fn check_buckets(&self) -> Result<()> {
        let width = sym_width(self.sigma);
        let mut buf = Vec::with_capacity(self.lb);
        let mut running = vec![0usize; self.sigma];
        for b in 0..=self.offsets.len() {
            for (c, &have) in running.iter().enumerate() {
                if self.table_rank(b, c) != have {
                    return Err(Error::Integrity("fmi2 rank tables disagree with buckets".into()));
                }
            }
            if b == self.offsets.len() {
                break;
            }
            let len = self.lb.min(self.n - b * self.lb);
            let mut cur = self.stream.reader(self.offsets.get(b) as usize);
            bucket::decode(&mut cur, width, len, self.sigma, &mut buf)?;
            for &s in &buf {
                running[s as usize] += 1;
            }
        }
        for (c, w) in self.c.windows(2).enumerate() {
            if w[1] - w[0] != running[c] {
                return Err(Error::Integrity("fmi2 C array disagrees with buckets".into()));
            }
        }
        Ok(())
    }
}

fn sym_width(sigma: usize) -> u32 {
    bit_width(sigma as u64 - 1).max(1)
}

impl SelfIndex for Fmi2Index {
    fn kind(&self) -> IndexKind {
        IndexKind::Fmi2
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn text_len(&self) -> usize {
        self.n0
    }

    fn params(&self) -> IndexParams {
        IndexParams {
            s_a: self.s_a,
            lb: self.lb,
            lsb: self.lsb,
            ..IndexParams::default()
        }
    }

    fn count_codes(&self, p: &[Sym]) -> usize {
        self.count_ranges(p).iter().map(|&(sp, ep)| ep - sp + 1).sum()
    }

    fn locate_codes(&self, p: &[Sym]) -> (Vec<usize>, WalkStats) {
        self.locate_ranges(&self.count_ranges(p))
    }

    fn extract_codes(&self, l: usize, r: usize) -> Vec<Sym> {
        self.extract_traced(l, r).0
    }

    fn space(&self) -> SpaceReport {
        SpaceReport::new(
            self.stream.len() + self.offsets.size_bits(),
            self.marked_positions.size_bits(),
            self.tsb.len() * 32 + self.tb.len() * 16 + self.c.len() * 64,
        )
    }

    fn write_payload(&self, w: &mut ByteWriter) {
        w.put_usize(self.s_a);
        w.put_usize(self.lb);
        w.put_usize(self.lsb);
        w.put_usize(self.n);
        w.put_usizes(&self.c);
        w.put_u32s(&self.tsb);
        w.put_u16s(&self.tb);
        self.offsets.write_to(w);
        self.stream.write_to(w);
        self.marked_positions.write_to(w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::ScanRank;
    use crate::RankAccess;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(s_a: usize, lb: usize, lsb: usize) -> IndexParams {
        IndexParams {
            s_a,
            lb,
            lsb,
            ..IndexParams::default()
        }
    }

    fn show(codes: &[Sym], t: &MappedText) -> String {
        codes
            .iter()
            .map(|&c| match c {
                TERMINATOR => '$',
                SPECIAL => '#',
                c => t.alphabet().byte(c - 1) as char,
            })
            .collect()
    }

    #[test]
    fn marking() {
        let t = MappedText::new(b"abracadabra").unwrap();
        assert_eq!(show(&mark_text(t.codes(), 4).unwrap(), &t), "abra#cada#bra$");
        assert_eq!(show(&mark_text(t.codes(), 20).unwrap(), &t), "abracadabra$");
        let e = MappedText::new(b"").unwrap();
        assert_eq!(mark_text(e.codes(), 3).unwrap(), vec![TERMINATOR]);
        assert!(mark_text(t.codes(), 1).is_err());
        assert_eq!(unmark_position(6, 4), 5);
        assert_eq!(unmark_position(11, 4), 9);
    }

    #[test]
    fn variant_enumeration() {
        let t = MappedText::new(b"acad").unwrap();
        let p: Vec<Sym> = t.codes()[..4].iter().map(|&c| c + 1).collect();
        let got: Vec<String> = variants(&p, 4).iter().map(|v| show(v, &t)).collect();
        assert_eq!(got, vec!["acad", "a#cad", "ac#ad", "aca#d"]);
        assert_eq!(variants(&p[..1], 4).len(), 1);
        // two marks inside a long pattern
        let long: Vec<Sym> = vec![2; 7];
        assert_eq!(variants(&long, 2)[1].iter().filter(|&&c| c == SPECIAL).count(), 3);
    }

    #[test]
    fn abracadabra_queries() {
        let t = MappedText::new(b"abracadabra").unwrap();
        let ix = Fmi2Index::build(&t, &params(4, 4, 2)).unwrap();
        assert_eq!(ix.count(b"abra"), 2);
        assert_eq!(ix.locate(b"abra"), vec![1, 8]);
        assert_eq!(ix.count(b"a"), 5);
        assert_eq!(ix.count_ranges(&t.alphabet().map_pattern(b"a").unwrap()).len(), 1);
        assert_eq!(ix.locate(b"a"), vec![1, 4, 6, 8, 11]);
        assert!(ix.locate_ranges(&[]).0.is_empty());
        assert_eq!(ix.count(b"x"), 0);
        assert_eq!(ix.extract(1, 4).unwrap(), b"abra");
        assert_eq!(ix.extract(8, 11).unwrap(), b"abra");
        assert_eq!(ix.extract(1, 11).unwrap(), b"abracadabra");
        let (sp, ep) = ix.special_rows_range();
        assert_eq!((sp, ep), (2, 3));
    }

    #[test]
    fn bucket_rank_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let n = rng.gen_range(0..500);
            let sigma = [2u8, 4, 16, 96][rng.gen_range(0..4)];
            let raw: Vec<u8> = (0..n).map(|_| 32 + rng.gen_range(0..sigma)).collect();
            let t = MappedText::new(&raw).unwrap();
            let lb = rng.gen_range(1..40);
            let ix = Fmi2Index::build(&t, &params(rng.gen_range(2..9), lb, rng.gen_range(1..5))).unwrap();
            let bwt = ix.bwt();
            let scan = ScanRank(&bwt);
            for i in 0..=bwt.len() {
                for c in 0..(t.sigma() + 1) as Sym {
                    assert_eq!(ix.bucket_rank(c, i).unwrap(), scan.rank(c, i));
                }
            }
            assert!(ix.bucket_rank(0, bwt.len() + 1).is_err());
        }
    }

    #[test]
    fn phases_bounded() {
        let raw: Vec<u8> = (0..3000u32).map(|i| b"ab"[((i * 7 + i / 5) % 2) as usize]).collect();
        let t = MappedText::new(&raw).unwrap();
        for s_a in [4, 16, 64] {
            let ix = Fmi2Index::build(&t, &params(s_a, 128, 8)).unwrap();
            for p in [&b"a"[..], b"ab", b"abba", b"babab"] {
                let (pos, stats) = ix.locate_traced(p);
                assert!(stats.max_steps <= s_a);
                assert_eq!(pos.len(), ix.count(p));
            }
        }
    }
}
