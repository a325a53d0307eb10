//! Alphabet mapping, suffix arrays, the BWT and LF-stepping.
//!
//! A [`MappedText`] holds the input bytes as dense codes `1..sigma` (in byte
//! order) followed by the terminator, code 0. Byte 0x00 is reserved for the
//! terminator and rejected in inputs.

use crate::error::{check_range, Error, Result};
use crate::persist::{ByteReader, ByteWriter, Persist};
use crate::{RankAccess, Sym};

pub const TERMINATOR: Sym = 0;

/// Byte <-> code tables. Code 0 is the terminator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    /// Distinct input bytes in increasing order; byte `bytes[k]` has code `k + 1`.
    bytes: Vec<u8>,
    map: [Sym; 256],
}

impl Alphabet {
    pub fn from_text(raw: &[u8]) -> Result<Self> {
        let mut seen = [false; 256];
        for (off, &b) in raw.iter().enumerate() {
            if b == 0 {
                return Err(Error::ReservedByte(off));
            }
            seen[b as usize] = true;
        }
        let bytes: Vec<u8> = (1..=255u8).filter(|&b| seen[b as usize]).collect();
        Self::from_bytes(bytes)
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self> {
        if bytes.contains(&0) || bytes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Integrity("alphabet bytes must be increasing and non-zero".into()));
        }
        let mut map = [0; 256];
        for (k, &b) in bytes.iter().enumerate() {
            map[b as usize] = (k + 1) as Sym;
        }
        Ok(Self { bytes, map })
    }

    /// Alphabet size including the terminator.
    pub fn sigma(&self) -> usize {
        self.bytes.len() + 1
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn code(&self, b: u8) -> Option<Sym> {
        match self.map[b as usize] {
            0 => None,
            c => Some(c),
        }
    }

    /// Maps a pattern; `None` if it contains a byte absent from the text.
    pub fn map_pattern(&self, p: &[u8]) -> Option<Vec<Sym>> {
        p.iter().map(|&b| self.code(b)).collect()
    }

    /// Inverse map; the terminator maps to byte 0.
    #[inline]
    pub fn byte(&self, c: Sym) -> u8 {
        if c == 0 {
            0
        } else {
            self.bytes[c as usize - 1]
        }
    }

    pub fn unmap(&self, codes: &[Sym]) -> Vec<u8> {
        codes.iter().map(|&c| self.byte(c)).collect()
    }
}

impl Persist for Alphabet {
    fn write_to(&self, w: &mut ByteWriter) {
        w.put_bytes(&self.bytes);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        Self::from_bytes(r.bytes()?.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappedText {
    alphabet: Alphabet,
    data: Vec<Sym>,
}

impl MappedText {
    pub fn new(raw: &[u8]) -> Result<Self> {
        let alphabet = Alphabet::from_text(raw)?;
        let mut data: Vec<Sym> = raw.iter().map(|&b| alphabet.map[b as usize]).collect();
        data.push(TERMINATOR);
        Ok(Self { alphabet, data })
    }

    /// Wraps already-mapped codes; the last code must be the only terminator.
    pub fn from_codes(alphabet: Alphabet, data: Vec<Sym>) -> Result<Self> {
        let sigma = alphabet.sigma();
        if data.last() != Some(&TERMINATOR) || data[..data.len() - 1].contains(&TERMINATOR) {
            return Err(Error::Integrity("text must end with a single terminator".into()));
        }
        if let Some(&bad) = data.iter().find(|&&c| c as usize >= sigma) {
            return Err(Error::Symbol {
                symbol: bad as usize,
                sigma,
            });
        }
        Ok(Self { alphabet, data })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn sigma(&self) -> usize {
        self.alphabet.sigma()
    }

    /// Length including the terminator.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of original bytes (without the terminator).
    pub fn raw_len(&self) -> usize {
        self.data.len() - 1
    }

    pub fn codes(&self) -> &[Sym] {
        &self.data
    }

    /// The original bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.alphabet.unmap(&self.data[..self.data.len() - 1])
    }
}

/// Suffix array with 0-based entries; `at` gives the 1-based view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixArray {
    sa: Vec<usize>,
}

impl SuffixArray {
    pub fn build(text: &MappedText) -> Self {
        Self {
            sa: suffix_array(text.codes()),
        }
    }

    /// `A[i]` for 1-based row `i`, as a 1-based text position.
    pub fn at(&self, i: usize) -> usize {
        self.sa[i - 1] + 1
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.sa
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    /// 1-based view of the whole array.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.sa.iter().map(|&p| p + 1).collect()
    }

    /// Inverse permutation, 0-based: `inv[pos] = row`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.sa.len()];
        for (row, &pos) in self.sa.iter().enumerate() {
            inv[pos] = row;
        }
        inv
    }
}

/// Prefix-doubling suffix sorting with two radix passes per round,
/// `O(n log n)` overall. Suffixes are compared as plain strings (a shorter
/// suffix sorts before any extension of it).
pub fn suffix_array(s: &[Sym]) -> Vec<usize> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let max_sym = *s.iter().max().unwrap() as usize;
    let mut rank: Vec<usize> = s.iter().map(|&c| c as usize).collect();
    let mut sa = counting_sort((0..n).collect(), &rank, max_sym + 1);
    let mut tmp = vec![0usize; n];
    // dense ranks of single symbols
    let mut r = 0;
    for i in 0..n {
        if i > 0 && s[sa[i]] != s[sa[i - 1]] {
            r += 1;
        }
        tmp[sa[i]] = r;
    }
    std::mem::swap(&mut rank, &mut tmp);
    let mut k = 1;
    while r + 1 < n {
        // order by second key: suffixes with no partner first
        let mut order = Vec::with_capacity(n);
        order.extend(n - k..n);
        order.extend(sa.iter().filter(|&&p| p >= k).map(|&p| p - k));
        sa = counting_sort(order, &rank, r + 1);
        let key = |i: usize| (rank[i], if i + k < n { rank[i + k] + 1 } else { 0 });
        r = 0;
        tmp[sa[0]] = 0;
        for i in 1..n {
            if key(sa[i]) != key(sa[i - 1]) {
                r += 1;
            }
            tmp[sa[i]] = r;
        }
        std::mem::swap(&mut rank, &mut tmp);
        k *= 2;
    }
    sa
}

/// Stable counting sort of `items` by `key[item]`.
fn counting_sort(items: Vec<usize>, key: &[usize], buckets: usize) -> Vec<usize> {
    let mut count = vec![0usize; buckets + 1];
    for &i in &items {
        count[key[i] + 1] += 1;
    }
    for b in 1..=buckets {
        count[b] += count[b - 1];
    }
    let mut out = vec![0; items.len()];
    for &i in &items {
        let slot = &mut count[key[i]];
        out[*slot] = i;
        *slot += 1;
    }
    out
}

/// LCP array: `lcp[i]` = longest common prefix of suffixes at rows `i-1`
/// and `i` (0-based), with `lcp[0] = 0`.
pub fn lcp_array(s: &[Sym], sa: &[usize]) -> Vec<usize> {
    let n = s.len();
    let mut inv = vec![0; n];
    for (r, &p) in sa.iter().enumerate() {
        inv[p] = r;
    }
    let mut lcp = vec![0; n];
    let mut h = 0usize;
    for i in 0..n {
        if inv[i] > 0 {
            let j = sa[inv[i] - 1];
            while i + h < n && j + h < n && s[i + h] == s[j + h] {
                h += 1;
            }
            lcp[inv[i]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

/// `C[c]` = number of symbols smaller than `c`; `sigma + 1` entries.
pub fn c_array(seq: &[Sym], sigma: usize) -> Vec<usize> {
    let mut c = vec![0usize; sigma + 1];
    for &s in seq {
        c[s as usize + 1] += 1;
    }
    for k in 1..=sigma {
        c[k] += c[k - 1];
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwtText {
    bwt: Vec<Sym>,
    c: Vec<usize>,
    sigma: usize,
}

impl BwtText {
    /// `bwt[i] = T[A[i] - 1]`, wrapping to `T[n]` at `A[i] = 1`.
    pub fn from_sa(text: &MappedText, sa: &SuffixArray) -> Self {
        let s = text.codes();
        let n = s.len();
        let bwt: Vec<Sym> = sa
            .as_slice()
            .iter()
            .map(|&p| s[if p == 0 { n - 1 } else { p - 1 }])
            .collect();
        let c = c_array(&bwt, text.sigma());
        Self {
            bwt,
            c,
            sigma: text.sigma(),
        }
    }

    pub fn from_parts(bwt: Vec<Sym>, sigma: usize) -> Result<Self> {
        if let Some(&bad) = bwt.iter().find(|&&c| c as usize >= sigma) {
            return Err(Error::Symbol {
                symbol: bad as usize,
                sigma,
            });
        }
        let c = c_array(&bwt, sigma);
        Ok(Self { bwt, c, sigma })
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.bwt
    }

    pub fn c_array(&self) -> &[usize] {
        &self.c
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.bwt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bwt.is_empty()
    }
}

/// `LF(i) = C[c] + rank_c(bwt, i)` with `c = bwt[i]`, 1-based rows.
pub fn lf_step<R: RankAccess + ?Sized>(c_array: &[usize], ranks: &R, i: usize) -> Result<usize> {
    check_range("row", i, 1, ranks.len())?;
    let (c, r) = ranks.access_rank(i);
    Ok(c_array[c as usize] + r)
}

/// Rebuilds the text (as codes, terminator last) from its BWT by `n`
/// LF-steps starting at the terminator row.
pub fn invert_bwt(b: &BwtText) -> Result<Vec<Sym>> {
    let bwt = &b.bwt;
    let n = bwt.len();
    let terms = bwt.iter().filter(|&&c| c == TERMINATOR).count();
    if terms != 1 {
        return Err(Error::Integrity(format!(
            "BWT must contain exactly one terminator, found {terms}"
        )));
    }
    // LF for every row via a running occurrence count
    let mut next = b.c.clone();
    let lf: Vec<usize> = bwt
        .iter()
        .map(|&c| {
            let r = next[c as usize];
            next[c as usize] += 1;
            r
        })
        .collect();
    let mut out = vec![TERMINATOR; n];
    let mut row = 0;
    for k in (0..n - 1).rev() {
        let c = bwt[row];
        if c == TERMINATOR {
            return Err(Error::Integrity("BWT decodes to more than one cycle".into()));
        }
        out[k] = c;
        row = lf[row];
    }
    if bwt[row] != TERMINATOR {
        return Err(Error::Integrity("LF walk did not close at the terminator".into()));
    }
    Ok(out)
}

/// Rank/access by direct scan over a plain slice. Test and oracle use only.
#[derive(Debug, Clone, Copy)]
pub struct ScanRank<'a>(pub &'a [Sym]);

impl RankAccess for ScanRank<'_> {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn rank(&self, c: Sym, i: usize) -> usize {
        self.0[..i].iter().filter(|&&s| s == c).count()
    }

    fn access(&self, i: usize) -> Sym {
        self.0[i - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Sorts all cyclic rotations explicitly.
    fn rotation_bwt(s: &[u8]) -> Vec<u8> {
        let n = s.len();
        let mut rots: Vec<Vec<u8>> = (0..n).map(|i| [&s[i..], &s[..i]].concat()).collect();
        rots.sort();
        rots.iter().map(|r| r[n - 1]).collect()
    }

    fn naive_sa(s: &[Sym]) -> Vec<usize> {
        let mut sa: Vec<usize> = (0..s.len()).collect();
        sa.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
        sa
    }

    fn show(t: &MappedText, codes: &[Sym]) -> String {
        codes
            .iter()
            .map(|&c| if c == 0 { '$' } else { t.alphabet().byte(c) as char })
            .collect()
    }

    #[test]
    fn mapping_basics() {
        let t = MappedText::new(b"abracadabra").unwrap();
        assert_eq!(t.sigma(), 6);
        assert_eq!(t.len(), 12);
        assert_eq!(t.to_bytes(), b"abracadabra");
        let e = MappedText::new(b"").unwrap();
        assert_eq!(e.len(), 1);
        assert!(matches!(MappedText::new(b"ab\0c"), Err(Error::ReservedByte(2))));
        assert_eq!(t.alphabet().map_pattern(b"xyz"), None);
    }

    #[test]
    fn suffix_array_examples() {
        let t = MappedText::new(b"abracadabra").unwrap();
        let sa = SuffixArray::build(&t);
        assert_eq!(sa.as_slice(), naive_sa(t.codes()).as_slice());
        assert_eq!(sa.to_one_based(), vec![12, 11, 8, 1, 4, 6, 9, 2, 5, 7, 10, 3]);
        let t = MappedText::new(b"aaa").unwrap();
        assert_eq!(SuffixArray::build(&t).to_one_based(), vec![4, 3, 2, 1]);
        let t = MappedText::new(b"").unwrap();
        assert_eq!(SuffixArray::build(&t).to_one_based(), vec![1]);
    }

    #[test]
    fn bwt_examples_match_rotation_sort() {
        for (raw, expect) in [
            (&b"abracadabra"[..], "ard$rcaaaabb"),
            (&b"mississippi"[..], "ipssm$pissii"),
            (&b""[..], "$"),
        ] {
            let mut with_term = raw.to_vec();
            with_term.push(b'$');
            // '$' < letters in ASCII so rotation order matches code order
            let oracle: String = rotation_bwt(&with_term).iter().map(|&b| b as char).collect();
            assert_eq!(oracle, expect);
            let t = MappedText::new(raw).unwrap();
            let b = BwtText::from_sa(&t, &SuffixArray::build(&t));
            assert_eq!(show(&t, b.symbols()), expect);
            assert_eq!(invert_bwt(&b).unwrap(), t.codes());
        }
    }

    #[test]
    fn lf_examples() {
        let t = MappedText::new(b"abracadabra").unwrap();
        let b = BwtText::from_sa(&t, &SuffixArray::build(&t));
        let r = ScanRank(b.symbols());
        // row 4 holds '$'
        assert_eq!(lf_step(b.c_array(), &r, 4).unwrap(), 1);
        // row 1 holds 'a', C[a] = 1
        assert_eq!(b.c_array()[1], 1);
        assert_eq!(lf_step(b.c_array(), &r, 1).unwrap(), 2);
        assert!(lf_step(b.c_array(), &r, 13).is_err());
        let one = BwtText::from_parts(vec![0], 1).unwrap();
        assert_eq!(lf_step(one.c_array(), &ScanRank(one.symbols()), 1).unwrap(), 1);
    }

    #[test]
    fn malformed_bwt_rejected() {
        let no_term = BwtText::from_parts(vec![1, 2, 1], 3).unwrap();
        assert!(matches!(invert_bwt(&no_term), Err(Error::Integrity(_))));
        // "ab$" rotations produce "b$a"; swapping to two cycles breaks it
        let two_cycles = BwtText::from_parts(vec![0, 1, 2, 2, 1], 3).unwrap();
        assert!(invert_bwt(&two_cycles).is_err());
    }

    #[test]
    fn random_texts_roundtrip_and_lf_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..1000 {
            let sigma = [2usize, 4, 16, 96][trial % 4];
            let n = rng.gen_range(0..=if trial < 900 { 300 } else { 5000 });
            let raw: Vec<u8> = (0..n).map(|_| 32 + rng.gen_range(0..sigma) as u8).collect();
            let t = MappedText::new(&raw).unwrap();
            let sa = SuffixArray::build(&t);
            if n <= 300 {
                assert_eq!(sa.as_slice(), naive_sa(t.codes()).as_slice());
            }
            let b = BwtText::from_sa(&t, &sa);
            assert_eq!(invert_bwt(&b).unwrap(), t.codes());
            if n <= 300 {
                let r = ScanRank(b.symbols());
                let mut seen = vec![false; t.len()];
                let mut row = 1;
                for _ in 0..t.len() {
                    assert!(!seen[row - 1]);
                    seen[row - 1] = true;
                    row = lf_step(b.c_array(), &r, row).unwrap();
                }
                assert_eq!(row, 1);
            }
        }
    }

    #[test]
    fn lcp_matches_direct_comparison() {
        let t = MappedText::new(b"mississippi").unwrap();
        let sa = SuffixArray::build(&t);
        let lcp = lcp_array(t.codes(), sa.as_slice());
        let s = t.codes();
        for i in 1..s.len() {
            let (a, b) = (&s[sa.as_slice()[i - 1]..], &s[sa.as_slice()[i]..]);
            let direct = a.iter().zip(b).take_while(|(x, y)| x == y).count();
            assert_eq!(lcp[i], direct);
        }
    }
}
