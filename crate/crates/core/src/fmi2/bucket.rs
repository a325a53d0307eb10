//! Bucket codec: move-to-front over the bucket's own alphabet, zero runs
//! written as bijective base-2 digits (RUNA = 1, RUNB = 2), then a canonical
//! Huffman code.
//!
//! Layout of one bucket:
//!
//! ```text
//! gamma(k) | k local symbols, ascending, `width` bits each
//! | single: 1 bit
//!   single = 1: gamma(token + 1)              (the only token, 0-bit code)
//!   single = 0: k + 1 code lengths, 6 bits each
//! | token codes
//! ```
//!
//! Tokens: 0 = RUNA, 1 = RUNB, `v + 1` = MTF value `v >= 1`.

use crate::bits::{BitBuf, BitCursor};
use crate::error::{Error, Result};
use crate::huffman::{self, Decoder};
use crate::Sym;

const RUNA: usize = 0;
const RUNB: usize = 1;
const LEN_BITS: u32 = 6;

fn mtf_tokens(syms: &[Sym], local: &[Sym]) -> Vec<usize> {
    let mut order: Vec<Sym> = local.to_vec();
    let mut tokens = Vec::with_capacity(syms.len());
    let mut run = 0usize;
    for &s in syms {
        let v = order.iter().position(|&x| x == s).expect("symbol in local alphabet");
        if v == 0 {
            run += 1;
            continue;
        }
        push_run(&mut tokens, &mut run);
        order[..=v].rotate_right(1);
        tokens.push(v + 1);
    }
    push_run(&mut tokens, &mut run);
    tokens
}

/// Bijective base-2: digits 1 (RUNA) and 2 (RUNB), least significant first.
fn push_run(tokens: &mut Vec<usize>, run: &mut usize) {
    let mut r = *run;
    while r > 0 {
        if r % 2 == 1 {
            tokens.push(RUNA);
            r = (r - 1) / 2;
        } else {
            tokens.push(RUNB);
            r = (r - 2) / 2;
        }
    }
    *run = 0;
}

/// Appends the encoding of a non-empty bucket to `out`.
pub fn encode(syms: &[Sym], width: u32, out: &mut BitBuf) {
    assert!(!syms.is_empty());
    let mut local: Vec<Sym> = syms.to_vec();
    local.sort_unstable();
    local.dedup();
    out.push_gamma(local.len() as u64);
    for &s in &local {
        out.push_bits(s as u64, width);
    }
    let tokens = mtf_tokens(syms, &local);
    let mut freqs = vec![0u64; local.len() + 1];
    for &t in &tokens {
        freqs[t] += 1;
    }
    let present: Vec<usize> = (0..freqs.len()).filter(|&t| freqs[t] > 0).collect();
    if present.len() == 1 {
        out.push(true);
        out.push_gamma(present[0] as u64 + 1);
        return;
    }
    out.push(false);
    let lengths = huffman::code_lengths(&freqs);
    for &l in &lengths {
        out.push_bits(l as u64, LEN_BITS);
    }
    let codes = huffman::canonical_codes(&lengths);
    for &t in &tokens {
        huffman::push_code(out, codes[t]);
    }
}

/// Decodes a bucket of `len` symbols into `out` (cleared first).
pub fn decode(cur: &mut BitCursor<'_>, width: u32, len: usize, sigma: usize, out: &mut Vec<Sym>) -> Result<()> {
    out.clear();
    let bad = |m: &str| Error::Integrity(format!("bucket: {m}"));
    let k = cur.read_gamma()? as usize;
    if k == 0 || k > sigma {
        return Err(bad("local alphabet size"));
    }
    let mut order = Vec::with_capacity(k);
    for _ in 0..k {
        let s = cur.read_bits(width)? as usize;
        if s >= sigma || order.last().is_some_and(|&p: &Sym| p as usize >= s) {
            return Err(bad("local alphabet not ascending"));
        }
        order.push(s as Sym);
    }
    let decoder = if cur.read()? {
        let t = cur.read_gamma()? as usize - 1;
        if t > k {
            return Err(bad("token out of range"));
        }
        Decoder::single(t)
    } else {
        let mut lengths = vec![0u8; k + 1];
        for l in lengths.iter_mut() {
            *l = cur.read_bits(LEN_BITS)? as u8;
        }
        Decoder::new(&lengths)?
    };
    let mut run = 0usize;
    let mut digit = 1usize;
    while out.len() + run < len {
        let t = decoder.decode(cur)?;
        match t {
            RUNA | RUNB => {
                run += digit * (t + 1);
                digit <<= 1;
            }
            v => {
                let v = v - 1;
                if v >= k {
                    return Err(bad("MTF index out of range"));
                }
                out.extend(std::iter::repeat_n(order[0], run));
                run = 0;
                digit = 1;
                order[..=v].rotate_right(1);
                out.push(order[0]);
            }
        }
    }
    if out.len() + run != len {
        return Err(bad("length mismatch"));
    }
    out.extend(std::iter::repeat_n(order[0], run));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bit_width;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn roundtrip(syms: &[Sym], sigma: usize) {
        let width = bit_width(sigma as u64 - 1);
        let mut buf = BitBuf::new();
        buf.push_bits(0b101, 3);
        encode(syms, width, &mut buf);
        let end = buf.len();
        let mut cur = buf.reader(3);
        let mut out = Vec::new();
        decode(&mut cur, width, syms.len(), sigma, &mut out).unwrap();
        assert_eq!(out, syms);
        assert_eq!(cur.position(), end);
    }

    #[test]
    fn run_digits() {
        for r in 1..200 {
            let mut tokens = Vec::new();
            push_run(&mut tokens, &mut { r });
            let value: usize = tokens.iter().enumerate().map(|(i, &t)| (t + 1) << i).sum();
            assert_eq!(value, r);
        }
    }

    #[test]
    fn small_cases() {
        roundtrip(&[3], 5);
        roundtrip(&[3, 3, 3, 3], 5);
        roundtrip(&[1, 2], 5);
        roundtrip(&[2, 1, 1, 1, 2, 2, 0, 4], 5);
    }

    #[test]
    fn random_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10_000 {
            let sigma = rng.gen_range(1..=258usize);
            let len = rng.gen_range(1..200);
            let skew = rng.gen_range(1..=sigma);
            let syms: Vec<Sym> = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.7) {
                        rng.gen_range(0..skew) as Sym
                    } else {
                        rng.gen_range(0..sigma) as Sym
                    }
                })
                .collect();
            roundtrip(&syms, sigma);
        }
    }

    #[test]
    fn corrupt_bucket_is_an_error() {
        let mut buf = BitBuf::new();
        encode(&[1, 2, 1, 1, 0, 2], 2, &mut buf);
        let mut out = Vec::new();
        assert!(decode(&mut buf.reader(0), 2, 40, 3, &mut out).is_err());
    }
}
