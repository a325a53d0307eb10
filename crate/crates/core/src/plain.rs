//! Plain suffix array over the uncompressed text: binary-search counting,
//! direct locate and extract. Serves as the space/time baseline and as the
//! reference answer in validation runs.

use std::cmp::Ordering;

use crate::bits::IntVector;
use crate::error::{Error, Result};
use crate::index::{IndexKind, IndexParams, LoadContext, SelfIndex, SpaceReport, WalkStats};
use crate::persist::{ByteReader, ByteWriter, Persist};
use crate::text::{Alphabet, MappedText, SuffixArray};
use crate::Sym;

/// `(sp, ep)` 1-based rows of suffixes prefixed by `p`; `None` if empty.
pub fn sa_count(text: &[Sym], sa: &[usize], p: &[Sym]) -> Option<(usize, usize)> {
    let cmp = |&start: &usize| -> Ordering {
        let suffix = &text[start..];
        let k = suffix.len().min(p.len());
        suffix[..k].cmp(&p[..k]).then(if k < p.len() {
            Ordering::Less
        } else {
            Ordering::Equal
        })
    };
    let lo = sa.partition_point(|s| cmp(s) == Ordering::Less);
    let hi = sa.partition_point(|s| cmp(s) != Ordering::Greater);
    (lo < hi).then_some((lo + 1, hi))
}

/// `{A[i] : sp <= i <= ep}` in ascending order, 1-based positions.
pub fn sa_locate(text: &[Sym], sa: &[usize], p: &[Sym]) -> Vec<usize> {
    let Some((sp, ep)) = sa_count(text, sa, p) else {
        return Vec::new();
    };
    let mut out: Vec<usize> = sa[sp - 1..ep].iter().map(|&x| x + 1).collect();
    out.sort_unstable();
    out
}

#[derive(Debug, Clone)]
pub struct PlainSa {
    alphabet: Alphabet,
    text: Vec<Sym>,
    sa: Vec<usize>,
}

impl PlainSa {
    pub fn build(text: &MappedText) -> Self {
        Self::with_sa(text, &SuffixArray::build(text))
    }

    pub fn with_sa(text: &MappedText, sa: &SuffixArray) -> Self {
        Self {
            alphabet: text.alphabet().clone(),
            text: text.codes().to_vec(),
            sa: sa.as_slice().to_vec(),
        }
    }

    pub fn count_range(&self, p: &[Sym]) -> Option<(usize, usize)> {
        sa_count(&self.text, &self.sa, p)
    }

    pub(crate) fn read_payload(ctx: LoadContext, r: &mut ByteReader<'_>) -> Result<Self> {
        let text: Vec<Sym> = IntVector::read_from(r)?.iter().map(|v| v as Sym).collect();
        let sa: Vec<usize> = IntVector::read_from(r)?.iter().map(|v| v as usize).collect();
        let n = ctx.text_len + 1;
        let mut seen = vec![false; n];
        let perm = sa.len() == n
            && sa.iter().all(|&p| p < n && !std::mem::replace(&mut seen[p], true));
        if text.len() != n || !perm {
            return Err(Error::Integrity("plain SA payload disagrees with header".into()));
        }
        let mapped = MappedText::from_codes(ctx.alphabet, text)?;
        Ok(Self {
            alphabet: mapped.alphabet().clone(),
            text: mapped.codes().to_vec(),
            sa,
        })
    }
}

impl SelfIndex for PlainSa {
    fn kind(&self) -> IndexKind {
        IndexKind::PlainSa
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn text_len(&self) -> usize {
        self.text.len() - 1
    }

    fn params(&self) -> IndexParams {
        IndexParams::default()
    }

    fn count_codes(&self, p: &[Sym]) -> usize {
        self.count_range(p).map_or(0, |(sp, ep)| ep - sp + 1)
    }

    fn locate_codes(&self, p: &[Sym]) -> (Vec<usize>, WalkStats) {
        let out = sa_locate(&self.text, &self.sa, p);
        let stats = WalkStats {
            occurrences: out.len(),
            ..WalkStats::default()
        };
        (out, stats)
    }

    fn extract_codes(&self, l: usize, r: usize) -> Vec<Sym> {
        self.text[l - 1..r].to_vec()
    }

    fn space(&self) -> SpaceReport {
        // text bytes plus one machine word per suffix, as the baseline is usually deployed
        SpaceReport::new(self.text.len() * 8, 0, self.sa.len() * 32)
    }

    fn write_payload(&self, w: &mut ByteWriter) {
        let text: Vec<u64> = self.text.iter().map(|&c| c as u64).collect();
        IntVector::from_slice(&text, self.alphabet.sigma() as u64 - 1).write_to(w);
        IntVector::from_usizes(&self.sa, self.sa.len()).write_to(w);
    }
}
