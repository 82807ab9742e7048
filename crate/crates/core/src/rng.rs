//! Deterministic random streams.
//!
//! Every sampled quantity is driven by a `ChaCha8Rng`; per-sample streams are
//! derived from `(master seed, sample index)` so parallel evaluation gives
//! the same results as sequential evaluation.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SampleRng = ChaCha8Rng;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(mix(mix(seed) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93)))
}

/// Isotropic standard Gaussian vector.
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Uniform point of the unit sphere in `R^dim`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}
