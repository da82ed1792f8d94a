//! Deterministic, platform-independent pseudo-random numbers.
//!
//! The generator is xorshift64* (Marsaglia / Vigna):
//!
//! ```text
//! x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;
//! output = x * 0x2545F4914F6CDD1D   (wrapping, mod 2^64)
//! ```
//!
//! Seeds are scrambled with one round of splitmix64 so that nearby seeds
//! (0, 1, 2, ...) give unrelated streams; a zero state is remapped to a
//! fixed non-zero constant. Floating-point draws use the top 53 bits of the
//! output. Gaussian draws use the Box-Muller transform evaluated with the
//! pure-Rust `libm` routines, so every sample is bit-identical across hosts.
//!
//! The recurrence, constants and derivation of doubles are part of the
//! reproducibility contract: changing any of them changes every generated
//! scene and every event log.

const ZERO_STATE_REMAP: u64 = 0x9E37_79B9_7F4A_7C15;

/// One round of splitmix64. Used for seed scrambling and for
/// [`mix_seed`].
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of sub-stream `index` from a base seed.
pub fn mix_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

/// xorshift64* generator with a single 64-bit state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimRng {
    state: u64,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        Self {
            state: if s == 0 { ZERO_STATE_REMAP } else { s },
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform double in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform double in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)`. `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        // Lemire's multiply-shift; bias is < n / 2^64 and irrelevant here.
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Standard normal draw (Box-Muller, cosine branch only).
    pub fn normal(&mut self) -> f64 {
        // 1 - u keeps the log argument in (0, 1].
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * std::f64::consts::PI * u2)
    }
}
