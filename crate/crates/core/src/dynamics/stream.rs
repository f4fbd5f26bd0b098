use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Identifies one reproducible random stream.
///
/// The ChaCha key is derived from `(master_seed, chain_index)` and the ChaCha
/// stream id is `level_index`, so every triple addresses its own counter space
/// and the draws never depend on which thread consumes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub chain_index: u64,
    pub level_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, chain_index: u64, level_index: u64) -> Self {
        Self {
            master_seed,
            chain_index,
            level_index,
        }
    }

    /// Same chain, different level.
    pub fn at_level(self, level_index: u64) -> Self {
        Self {
            level_index,
            ..self
        }
    }

    /// A generator positioned at the start of this stream.
    pub fn generator(&self) -> StreamRng {
        let mut state = self.master_seed ^ 0x6c61_6973_5f6b_6579;
        let mut key = [0u8; 32];
        let mut mix = splitmix64(&mut state) ^ self.chain_index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        for chunk in key.chunks_exact_mut(8) {
            mix = splitmix64(&mut mix);
            chunk.copy_from_slice(&mix.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.level_index);
        StreamRng { rng }
    }
}

/// Generator handed out by [`RngStream::generator`].
#[derive(Debug, Clone)]
pub struct StreamRng {
    rng: ChaCha8Rng,
}

impl StreamRng {
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for z in out.iter_mut() {
            *z = StandardNormal.sample(&mut self.rng);
        }
    }

    /// Position in the underlying counter, in 32-bit words.
    pub fn word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// SplitMix64 step; also used to derive per-replication seeds.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replication `r` under `master_seed`.
pub fn replication_seed(master_seed: u64, replication: u64) -> u64 {
    let mut s = master_seed ^ replication.wrapping_mul(0xd1b5_4a32_d192_ed03);
    splitmix64(&mut s)
}
