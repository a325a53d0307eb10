#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfidx::{synth, IndexParams};

pub const SIGMAS: [usize; 4] = [2, 4, 16, 96];

/// 1-based start positions of every occurrence of `p` in `t`.
pub fn naive_locate(t: &[u8], p: &[u8]) -> Vec<usize> {
    if p.is_empty() || p.len() > t.len() {
        return Vec::new();
    }
    (0..=t.len() - p.len()).filter(|&i| &t[i..i + p.len()] == p).map(|i| i + 1).collect()
}

/// Last column of the sorted rotation matrix, the slow way.
pub fn rotation_bwt(s: &[u8]) -> Vec<u8> {
    let n = s.len();
    let mut rots: Vec<Vec<u8>> = (0..n).map(|i| [&s[i..], &s[..i]].concat()).collect();
    rots.sort();
    rots.iter().map(|r| r[n - 1]).collect()
}

/// A trial text: generator, length and sigma derived from the trial number.
pub struct Trial {
    pub id: usize,
    pub gen: &'static str,
    pub sigma: usize,
    pub text: Vec<u8>,
}

pub fn trial_text(id: usize, max_n: usize, seed: u64) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let sigma = SIGMAS[id % 4];
    let gen = if (id / 4).is_multiple_of(2) { "uniform" } else { "markov" };
    let n = rng.gen_range(1..=max_n);
    let text = synth::generate(gen, n, sigma, rng.gen()).unwrap();
    Trial { id, gen, sigma, text }
}

/// Half sampled from the text, half drawn from the generator alphabet.
pub fn mixed_patterns(t: &[u8], sigma: usize, count: usize, max_m: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = synth::alphabet(sigma).unwrap();
    (0..count)
        .map(|i| {
            let m = rng.gen_range(1..=max_m);
            if i % 2 == 0 && m <= t.len() {
                let s = rng.gen_range(0..=t.len() - m);
                t[s..s + m].to_vec()
            } else {
                (0..m).map(|_| alpha[rng.gen_range(0..alpha.len())]).collect()
            }
        })
        .collect()
}

pub fn small_params(s_a: usize) -> IndexParams {
    IndexParams {
        s_a,
        s_psi: 16,
        k_max: 3,
        min_block: 4,
        lb: 64,
        lsb: 16,
        eps: 1.0,
    }
}
