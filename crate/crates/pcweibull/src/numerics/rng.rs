//! Seeded random streams. Same seed, same sequence, on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub type SeededRng = ChaCha12Rng;

/// Deterministic stream from a 64-bit seed.
pub fn make_rng(seed: u64) -> SeededRng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Child stream for parallel work: derived, never shared.
pub fn derive_rng(seed: u64, stream: u64) -> SeededRng {
    // mix with splitmix64 so (seed, stream) pairs do not collide trivially
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha12Rng::seed_from_u64(z ^ (z >> 31))
}

/// Exponential draw with rate `rate` by inversion.
pub fn sample_exponential<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    -u.ln() / rate
}

/// Standard normal via Box-Muller (one value per call, deterministic).
pub fn sample_standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
