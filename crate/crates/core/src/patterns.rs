//! Reproducible pattern sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "PCIX_SEED";
pub const DEFAULT_SEED: u64 = 20_240_917;

/// The seed from [`SEED_ENV`] if set and numeric, else [`DEFAULT_SEED`].
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// `count` substrings of length `m` taken at uniform random positions.
/// `m` must be at least 1 and at most the text length.
pub fn sample_patterns(text: &[u8], m: usize, count: usize, seed: u64) -> Result<Vec<Vec<u8>>> {
    if m == 0 || m > text.len() {
        return Err(Error::Param(format!(
            "pattern length {m} needs 1 <= m <= {} (text length)",
            text.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let s = rng.gen_range(0..=text.len() - m);
            text[s..s + m].to_vec()
        })
        .collect())
}

/// `count` strings of length `m` drawn uniformly over `symbols`; most are
/// absent from a long text.
pub fn random_patterns(symbols: &[u8], m: usize, count: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..m).map(|_| symbols[rng.gen_range(0..symbols.len())]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_patterns_occur() {
        let t = b"abracadabra";
        let ps = sample_patterns(t, 5, 10, 1).unwrap();
        assert_eq!(ps.len(), 10);
        for p in &ps {
            assert!(t.windows(5).any(|w| w == p.as_slice()));
        }
        assert_eq!(ps, sample_patterns(t, 5, 10, 1).unwrap());
    }

    #[test]
    fn boundaries() {
        let t = b"abracadabra";
        let whole = sample_patterns(t, 11, 3, 9).unwrap();
        assert!(whole.iter().all(|p| p == t));
        assert!(sample_patterns(t, 12, 1, 0).is_err());
        assert!(sample_patterns(t, 0, 1, 0).is_err());
    }
}
