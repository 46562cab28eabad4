//! Reproducible, splittable random streams.
//!
//! A [`RandomStream`] is identified by `(master_seed, stream_id)`. The
//! generator is ChaCha8 with a 256-bit key expanded from `master_seed` by
//! four SplitMix64 steps and the 64-bit ChaCha stream counter set to
//! `stream_id`, so distinct stream ids under one master seed are
//! independent cipher streams. The same pair always reproduces the same
//! variate sequence. Sub-streams fold the parent identity into a fresh
//! master seed via [`mix64`].

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step: mixes `state + GOLDEN` into a well-distributed word.
fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    *state = z ^ (z >> 31);
}

/// Deterministic 64-bit mixing of two words (SplitMix64 over `a ^ rot(b)`).
pub fn mix64(a: u64, b: u64) -> u64 {
    let mut s = a ^ b.rotate_left(32).wrapping_mul(0xD605_0B1A_B2C4_53B7);
    splitmix64(&mut s);
    let out = s;
    splitmix64(&mut s);
    out ^ s.rotate_left(17)
}

/// A seeded, single-owner random stream.
#[derive(Debug, Clone)]
pub struct RandomStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = master_seed;
        for chunk in key.chunks_exact_mut(8) {
            splitmix64(&mut state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream_id);
        RandomStream {
            master_seed,
            stream_id,
            rng,
        }
    }

    /// Derive an independent child stream. The parent identity is folded
    /// into the child's master seed, so `substream(k)` trees never collide
    /// with sibling streams for practical workloads.
    pub fn substream(&self, id: u64) -> Self {
        RandomStream::new(mix64(self.master_seed, self.stream_id), id)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw on the open interval (0, 1); redraws the (probability
    /// 2⁻⁵³) exact zero so quantile transforms stay finite.
    pub fn uniform_open01(&mut self) -> f64 {
        loop {
            let u: f64 = rand::Rng::gen(&mut self.rng);
            if u > 0.0 {
                return u;
            }
        }
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}
