//! Seed derivation for reproducible parallel-safe randomness.
//!
//! Every component that needs independent random streams (trees of a forest,
//! days of a synthetic stream) derives a child seed from its parent seed and
//! its own index. Results are therefore identical whether the component runs
//! sequentially or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixes a base seed with a stream index into a new 64-bit seed
/// (splitmix64 finalizer over the xored pair).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic generator for a derived stream.
pub fn stream_rng(base: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stream))
}

/// Standard normal draw via Box-Muller; consumes exactly two uniforms.
pub fn sample_standard_normal(rng: &mut impl rand::Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
