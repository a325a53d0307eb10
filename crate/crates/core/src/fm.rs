//! Backward search, LF-based locate, and extraction shared by the
//! FM-index variants that expose plain rank/access over the BWT.

use crate::error::{Error, Result};
use crate::index::WalkStats;
use crate::persist::{ByteReader, ByteWriter, Persist};
use crate::sampling::SaSampling;
use crate::{RankAccess, Sym};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmCore<R> {
    bwt: R,
    c: Vec<usize>,
    sampling: SaSampling,
}

impl<R: RankAccess> FmCore<R> {
    pub fn new(bwt: R, c: Vec<usize>, sampling: SaSampling) -> Self {
        Self { bwt, c, sampling }
    }

    pub fn bwt(&self) -> &R {
        &self.bwt
    }

    pub fn c_array(&self) -> &[usize] {
        &self.c
    }

    pub fn sampling(&self) -> &SaSampling {
        &self.sampling
    }

    pub fn sigma(&self) -> usize {
        self.c.len() - 1
    }

    /// Rows including the terminator row.
    pub fn rows(&self) -> usize {
        self.bwt.len()
    }

    #[inline]
    pub fn lf(&self, i: usize) -> (Sym, usize) {
        let (c, r) = self.bwt.access_rank(i);
        (c, self.c[c as usize] + r)
    }

    /// Rows `[sp, ep]` (1-based) whose suffixes start with `p`.
    pub fn count_range(&self, p: &[Sym]) -> Option<(usize, usize)> {
        let (mut sp, mut ep) = (1, self.rows());
        for &c in p.iter().rev() {
            let c = c as usize;
            if c >= self.sigma() || self.c[c] == self.c[c + 1] {
                return None;
            }
            sp = self.c[c] + self.bwt.rank(c as Sym, sp - 1) + 1;
            ep = self.c[c] + self.bwt.rank(c as Sym, ep);
            if sp > ep {
                return None;
            }
        }
        Some((sp, ep))
    }

    /// `A[i]` and the number of LF-steps taken to find a sampled row.
    pub fn locate_row(&self, mut i: usize) -> (usize, usize) {
        let mut t = 0;
        loop {
            if let Some(a) = self.sampling.sample_at(i) {
                // the walk may pass from position 1 to the terminator at n
                let n = self.rows();
                return ((a + t - 1) % n + 1, t);
            }
            i = self.lf(i).1;
            t += 1;
        }
    }

    pub fn locate(&self, p: &[Sym]) -> (Vec<usize>, WalkStats) {
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

    /// `T[l..=r]` walking backwards from the first sample after `r`.
    /// Returns the symbols and the number of LF-steps used.
    pub fn extract(&self, l: usize, r: usize) -> (Vec<Sym>, usize) {
        let n = self.rows();
        let s_a = self.sampling.s_a();
        debug_assert!(1 <= l && l <= r && r < n);
        let d = (r + 1).div_ceil(s_a);
        let (mut row, mut pos) = if d * s_a <= n {
            (self.sampling.row_of_sample(d), d * s_a)
        } else {
            // A[1] = n: the terminator row
            (1, n)
        };
        let mut steps = 0;
        while pos > r + 1 {
            row = self.lf(row).1;
            pos -= 1;
            steps += 1;
        }
        let mut out = Vec::with_capacity(r - l + 1);
        for _ in l..=r {
            let (c, next) = self.lf(row);
            out.push(c);
            row = next;
            steps += 1;
        }
        out.reverse();
        (out, steps)
    }
}

impl<R: Persist> Persist for FmCore<R> {
    fn write_to(&self, w: &mut ByteWriter) {
        w.put_usizes(&self.c);
        self.sampling.write_to(w);
        self.bwt.write_to(w);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let c = r.usizes()?;
        let sampling = SaSampling::read_from(r)?;
        let bwt = R::read_from(r)?;
        if c.len() < 2 || c[0] != 0 || c.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Integrity("C array is not a prefix-count table".into()));
        }
        Ok(Self { bwt, c, sampling })
    }
}

impl<R: RankAccess> FmCore<R> {
    /// Checks loaded data against the structural invariants that queries rely on.
    pub(crate) fn check_consistent(&self) -> Result<()> {
        if *self.c.last().unwrap() != self.bwt.len() {
            return Err(Error::Integrity("C array total differs from BWT length".into()));
        }
        if self.sampling.mark().len() != self.bwt.len() {
            return Err(Error::Integrity("sampling covers a different number of rows".into()));
        }
        Ok(())
    }
}
