//! Synthetic texts: uniform, and order-2 Markov with two equiprobable
//! successors per context (so `H_2` is close to 1 bit).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The `sigma` bytes used for a synthetic alphabet: lowercase letters up to
/// 26 symbols, otherwise consecutive bytes from the space character.
pub fn alphabet(sigma: usize) -> Result<Vec<u8>> {
    if sigma == 0 || sigma > 224 {
        return Err(Error::Param(format!("synthetic alphabet size {sigma} not in 1..=224")));
    }
    let base = if sigma <= 26 { b'a' } else { b' ' };
    Ok((0..sigma).map(|k| base + k as u8).collect())
}

pub fn uniform(n: usize, sigma: usize, seed: u64) -> Result<Vec<u8>> {
    let sym = alphabet(sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| sym[rng.gen_range(0..sigma)]).collect())
}

pub fn markov2(n: usize, sigma: usize, seed: u64) -> Result<Vec<u8>> {
    let sym = alphabet(sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let succ: Vec<[usize; 2]> = (0..sigma * sigma)
        .map(|_| {
            if sigma == 1 {
                [0, 0]
            } else {
                let pick: Vec<usize> = (0..sigma).collect::<Vec<_>>().choose_multiple(&mut rng, 2).copied().collect();
                [pick[0], pick[1]]
            }
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    let (mut a, mut b) = (rng.gen_range(0..sigma), rng.gen_range(0..sigma));
    for _ in 0..n {
        let c = succ[a * sigma + b][rng.gen_range(0..2)];
        out.push(sym[c]);
        (a, b) = (b, c);
    }
    Ok(out)
}

/// Generator selected by name: `uniform` or `markov`.
pub fn generate(kind: &str, n: usize, sigma: usize, seed: u64) -> Result<Vec<u8>> {
    match kind {
        "uniform" => uniform(n, sigma, seed),
        "markov" | "markov2" => markov2(n, sigma, seed),
        other => Err(Error::Param(format!("unknown generator '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::analyze;
    use crate::text::MappedText;

    #[test]
    fn markov_has_low_h2() {
        let raw = markov2(200_000, 16, 4).unwrap();
        let rep = analyze(&MappedText::new(&raw).unwrap(), 2);
        let h2 = rep.h(2).unwrap();
        assert!((h2 - 1.0).abs() < 0.02, "H2 = {h2}");
        assert!(rep.h(0).unwrap() > 3.0);
    }

    #[test]
    fn deterministic() {
        assert_eq!(uniform(100, 4, 1).unwrap(), uniform(100, 4, 1).unwrap());
        assert_ne!(uniform(100, 4, 1).unwrap(), uniform(100, 4, 2).unwrap());
        assert!(generate("zipf", 1, 1, 1).is_err());
        assert!(alphabet(0).is_err());
    }
}
