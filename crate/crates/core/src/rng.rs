//! Seeded random number generation.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 generator
//! created with `ChaCha8Rng::seed_from_u64(seed)`. Independent streams
//! (optimizer restarts, sample batches) keep the same seed and select
//! `set_stream(k)` for stream `k`, so any draw is reproducible from the
//! pair `(seed, stream)` alone.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for stream `stream` of the given seed.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One standard normal draw via Box-Muller on two uniform draws.
/// Consumes exactly two `f64` samples from the generator.
pub(crate) fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Vector of independent standard complex Gaussians (re and im each N(0,1)).
pub(crate) fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
        .collect()
}
