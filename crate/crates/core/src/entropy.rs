//! Empirical entropy statistics of a text.
//!
//! `H_0(T) = sum_c (n_c/n) log2(n/n_c)` and
//! `H_k(T) = (1/n) sum_w |w_T| H_0(w_T)`, where `w_T` concatenates the
//! symbols that follow each occurrence of the length-`k` context `w`.
//! Statistics are taken over the raw text (no terminator) and contexts that
//! would run past the start of the text are simply absent.

use std::collections::HashMap;

use crate::text::MappedText;
use crate::Sym;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderStat {
    pub k: usize,
    /// Bits per symbol.
    pub h: f64,
    /// Number of distinct length-`k` contexts that occur.
    pub contexts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub n: usize,
    /// Distinct symbols in the raw text.
    pub sigma: usize,
    pub orders: Vec<OrderStat>,
    /// `1 / sum_c (n_c/n)^2`, or 0 for an empty text.
    pub inv_match_prob: f64,
}

impl EntropyReport {
    pub fn h(&self, k: usize) -> Option<f64> {
        self.orders.get(k).map(|o| o.h)
    }
}

/// `|s| * H_0(s)` from symbol counts.
pub fn weighted_h0(counts: impl IntoIterator<Item = usize>) -> f64 {
    let counts: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts.iter().map(|&c| c as f64 * (n / c as f64).log2()).sum()
}

/// Zero-order entropy of a sequence in bits per symbol.
pub fn h0(seq: &[Sym]) -> f64 {
    if seq.is_empty() {
        return 0.0;
    }
    let mut counts: HashMap<Sym, usize> = HashMap::new();
    for &s in seq {
        *counts.entry(s).or_default() += 1;
    }
    weighted_h0(counts.into_values()) / seq.len() as f64
}

pub fn analyze(text: &MappedText, k_max: usize) -> EntropyReport {
    let raw = &text.codes()[..text.raw_len()];
    analyze_codes(raw, k_max)
}

pub fn analyze_codes(raw: &[Sym], k_max: usize) -> EntropyReport {
    let n = raw.len();
    let mut counts: HashMap<Sym, usize> = HashMap::new();
    for &s in raw {
        *counts.entry(s).or_default() += 1;
    }
    let inv_match_prob = if n == 0 {
        0.0
    } else {
        let nf = n as f64;
        1.0 / counts.values().map(|&c| (c as f64 / nf).powi(2)).sum::<f64>()
    };
    let mut orders = Vec::with_capacity(k_max + 1);
    // ctx[i] = dense id of the length-k context ending just before i
    let mut ctx: Vec<u32> = vec![0; n];
    for k in 0..=k_max {
        if k > 0 {
            let mut ids: HashMap<(Sym, u32), u32> = HashMap::new();
            let mut next = vec![u32::MAX; n];
            for i in k..n {
                let key = (raw[i - k], ctx[i]);
                let fresh = ids.len() as u32;
                next[i] = *ids.entry(key).or_insert(fresh);
            }
            ctx = next;
        }
        let mut pairs: Vec<u64> = (k..n).map(|i| ((ctx[i] as u64) << 16) | raw[i] as u64).collect();
        pairs.sort_unstable();
        let mut total = 0.0;
        let mut contexts = 0;
        let mut start = 0;
        while start < pairs.len() {
            let c = pairs[start] >> 16;
            let mut end = start;
            let mut group = Vec::new();
            while end < pairs.len() && pairs[end] >> 16 == c {
                let sym = pairs[end];
                let run_start = end;
                while end < pairs.len() && pairs[end] == sym {
                    end += 1;
                }
                group.push(end - run_start);
            }
            total += weighted_h0(group);
            contexts += 1;
            start = end;
        }
        let h = if n == 0 { 0.0 } else { total / n as f64 };
        orders.push(OrderStat { k, h, contexts });
    }
    EntropyReport {
        n,
        sigma: counts.len(),
        orders,
        inv_match_prob,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct evaluation of the definition with string contexts.
    fn oracle_hk(s: &[u8], k: usize) -> (f64, usize) {
        let mut groups: HashMap<&[u8], Vec<u8>> = HashMap::new();
        for i in k..s.len() {
            groups.entry(&s[i - k..i]).or_default().push(s[i]);
        }
        let total: f64 = groups
            .values()
            .map(|g| {
                let mut c: HashMap<u8, usize> = HashMap::new();
                for &b in g {
                    *c.entry(b).or_default() += 1;
                }
                let len = g.len() as f64;
                c.values().map(|&x| x as f64 * (len / x as f64).log2()).sum::<f64>()
            })
            .sum();
        (total / s.len() as f64, groups.len())
    }

    #[test]
    fn tiny_examples() {
        let r = analyze(&MappedText::new(b"aaaa").unwrap(), 2);
        assert_eq!(r.h(0), Some(0.0));
        let r = analyze(&MappedText::new(b"aabb").unwrap(), 1);
        assert!((r.h(0).unwrap() - 1.0).abs() < 1e-12);
        assert!((r.h(1).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(r.orders[1].contexts, 2);
        assert!((r.inv_match_prob - 2.0).abs() < 1e-12);
    }

    #[test]
    fn abracadabra_h0() {
        let r = analyze(&MappedText::new(b"abracadabra").unwrap(), 0);
        let expect = (5.0 * (11f64 / 5.0).log2()
            + 2.0 * 2.0 * (11f64 / 2.0).log2()
            + 2.0 * (11f64).log2())
            / 11.0;
        assert!((r.h(0).unwrap() - expect).abs() < 1e-12);
        assert!((r.h(0).unwrap() - 2.040).abs() < 5e-4);
        assert_eq!(r.sigma, 5);
    }

    #[test]
    fn matches_oracle_and_chain_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..200 {
            let sigma = [2u8, 4, 16, 96][trial % 4];
            let n = rng.gen_range(1..2000);
            let raw: Vec<u8> = (0..n).map(|_| 33 + rng.gen_range(0..sigma)).collect();
            let t = MappedText::new(&raw).unwrap();
            let r = analyze(&t, 4);
            let distinct = r.sigma as f64;
            for k in 0..=4 {
                let (h, ctx) = oracle_hk(&raw, k);
                assert!((r.orders[k].h - h).abs() < 1e-9, "k={k}");
                assert_eq!(r.orders[k].contexts, ctx);
                assert!(r.orders[k].h >= -1e-12);
                if k > 0 {
                    assert!(r.orders[k].h <= r.orders[k - 1].h + 1e-9);
                }
            }
            assert!(r.orders[0].h <= distinct.log2() + 1e-9);
        }
    }
}
