use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::C64;

/// Seeded ChaCha8 generator with cheap independent substreams.
///
/// A substream is the same 64-bit seed with a different ChaCha stream id, so
/// Monte Carlo trial `t` draws the same samples no matter which worker runs
/// it or in which order.
#[derive(Debug, Clone)]
pub struct SimRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        SimRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fresh generator on stream `key` of this generator's seed. Does not
    /// advance `self`.
    pub fn substream(&self, key: u64) -> SimRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(key);
        SimRng { seed: self.seed, inner }
    }

    /// Hashes a tuple of indices (sweep point, trial, ...) into a stream key.
    pub fn stream_key(parts: &[u64]) -> u64 {
        parts
            .iter()
            .fold(0x243f_6a88_85a3_08d3u64, |acc, &p| splitmix64(acc ^ p))
    }

    pub fn gaussian(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// CN(0, var): each real dimension has variance var/2.
    pub fn complex_gaussian(&mut self, var: f64) -> C64 {
        let s = (var / 2.0).sqrt();
        C64::new(s * self.gaussian(), s * self.gaussian())
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn uniform_phase(&mut self) -> C64 {
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.uniform())
    }

    pub fn bits(&mut self, n: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let w = self.inner.next_u64();
            for i in 0..64.min(n - out.len()) {
                out.push(((w >> i) & 1) as u8);
            }
        }
        out
    }
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
