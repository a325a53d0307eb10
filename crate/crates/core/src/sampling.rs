//! Regular suffix-array sampling for locate and extract.
//!
//! Row `i` is marked when `A[i]` is a multiple of `s_a`, and the row whose
//! suffix is the terminator alone (`A[i] = n`) is always marked so every
//! backward walk terminates. Marked `A` values are stored in row order and
//! addressed by `rank1(mark, i)`. For extraction, the row holding
//! `A = j * s_a` is stored at index `j` in text order.

use crate::bits::IntVector;
use crate::bitseq::{BitSeq, DEFAULT_BLOCK_SIZE};
use crate::error::{Error, Result};
use crate::persist::{ByteReader, ByteWriter, Persist};
use crate::text::SuffixArray;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaSampling {
    s_a: usize,
    n: usize,
    mark: BitSeq,
    /// Marked `A` values (1-based positions) in row order.
    sa_samples: IntVector,
    /// `text_samples[j - 1]` = 1-based row with `A = j * s_a`.
    text_samples: IntVector,
}

impl SaSampling {
    pub fn build(sa: &SuffixArray, s_a: usize) -> Result<Self> {
        if s_a == 0 {
            return Err(Error::Param("sampling rate s_a must be >= 1".into()));
        }
        let n = sa.len();
        let marked = |p: usize| p.is_multiple_of(s_a) || p == n;
        let mark = BitSeq::build(
            sa.as_slice().iter().map(|&p| marked(p + 1)),
            DEFAULT_BLOCK_SIZE,
        )?;
        let samples: Vec<usize> = sa
            .as_slice()
            .iter()
            .map(|&p| p + 1)
            .filter(|&p| marked(p))
            .collect();
        let mut by_text = vec![0usize; n / s_a];
        for (row, &p) in sa.as_slice().iter().enumerate() {
            if (p + 1) % s_a == 0 {
                by_text[(p + 1) / s_a - 1] = row + 1;
            }
        }
        Ok(Self {
            s_a,
            n,
            mark,
            sa_samples: IntVector::from_usizes(&samples, n),
            text_samples: IntVector::from_usizes(&by_text, n),
        })
    }

    pub fn s_a(&self) -> usize {
        self.s_a
    }

    /// `A[row]` if the row is marked.
    #[inline]
    pub fn sample_at(&self, row: usize) -> Option<usize> {
        if self.mark.get(row) {
            Some(self.sa_samples.get(self.mark.rank1_unchecked(row) - 1) as usize)
        } else {
            None
        }
    }

    /// Row whose suffix starts at text position `j * s_a`.
    pub fn row_of_sample(&self, j: usize) -> usize {
        self.text_samples.get(j - 1) as usize
    }

    pub fn text_sample_count(&self) -> usize {
        self.text_samples.len()
    }

    pub fn marked_rows(&self) -> usize {
        self.mark.count_ones()
    }

    pub fn mark(&self) -> &BitSeq {
        &self.mark
    }

    pub fn size_bits(&self) -> usize {
        self.mark.total_bits() + self.sa_samples.size_bits() + self.text_samples.size_bits()
    }
}

impl Persist for SaSampling {
    fn write_to(&self, w: &mut ByteWriter) {
        w.put_usize(self.s_a);
        w.put_usize(self.n);
        self.mark.write_to(w);
        self.sa_samples.write_to(w);
        self.text_samples.write_to(w);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let s_a = r.usize()?;
        let n = r.usize()?;
        let mark = BitSeq::read_from(r)?;
        let sa_samples = IntVector::read_from(r)?;
        let text_samples = IntVector::read_from(r)?;
        let ok = s_a >= 1
            && mark.len() == n
            && mark.count_ones() == sa_samples.len()
            && text_samples.len() == n / s_a
            && sa_samples.iter().all(|p| p >= 1 && p as usize <= n)
            && text_samples.iter().all(|row| row >= 1 && row as usize <= n);
        if !ok {
            return Err(Error::Integrity("inconsistent suffix-array sampling".into()));
        }
        Ok(Self {
            s_a,
            n,
            mark,
            sa_samples,
            text_samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::MappedText;

    #[test]
    fn abracadabra_marks() {
        let t = MappedText::new(b"abracadabra").unwrap();
        let sa = SuffixArray::build(&t);
        let s = SaSampling::build(&sa, 4).unwrap();
        let rows: Vec<usize> = (1..=12).filter(|&i| s.mark().get(i)).collect();
        assert_eq!(rows, vec![1, 3, 5]);
        assert_eq!(s.sample_at(1), Some(12));
        assert_eq!(s.sample_at(3), Some(8));
        assert_eq!(s.sample_at(5), Some(4));
        assert_eq!(s.sample_at(2), None);
        assert_eq!(s.row_of_sample(1), 5);
        assert_eq!(s.row_of_sample(2), 3);
        assert_eq!(s.row_of_sample(3), 1);

        let full = SaSampling::build(&sa, 1).unwrap();
        assert_eq!(full.marked_rows(), 12);
        let sparse = SaSampling::build(&sa, 12).unwrap();
        assert!(sparse.marked_rows() <= 2);
        assert!(SaSampling::build(&sa, 0).is_err());
    }
}
