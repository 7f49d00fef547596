//! Seeded random inputs for property checks and statistical verifiers.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::lp_space::{Exponent, LpVector, MeasureSpace, StepFunction};

pub type SampleRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent child seed for `stream`, stable across runs (splitmix64).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_values<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Standard Gaussian entries on coordinates `1..=dim`.
pub fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize) -> LpVector {
    LpVector::from_dense(&gaussian_values(rng, dim))
}

/// A direction of unit `p`-norm in the first `dim` coordinates.
pub fn unit_vector<R: Rng>(rng: &mut R, dim: usize, p: Exponent) -> LpVector {
    loop {
        let v = gaussian_vector(rng, dim);
        let n = v.norm(p);
        if n > 1e-8 {
            return (1.0 / n) * &v;
        }
    }
}

pub fn on_sphere<R: Rng>(rng: &mut R, dim: usize, r: f64, p: Exponent) -> LpVector {
    let u = unit_vector(rng, dim, p);
    let x = r * &u;
    // one correction step pins the norm to r up to a few ulps
    (r / x.norm(p)) * &x
}

/// Norm drawn from `r * U^(1/dim)`, direction Gaussian.
pub fn in_ball<R: Rng>(rng: &mut R, dim: usize, r: f64, p: Exponent) -> LpVector {
    let u: f64 = rng.random();
    let radius = r * u.powf(1.0 / dim as f64);
    radius * &unit_vector(rng, dim, p)
}

/// A point with norm uniform in `[lo * r, hi * r]`.
pub fn scaled_sphere<R: Rng>(rng: &mut R, dim: usize, r: f64, lo: f64, hi: f64, p: Exponent) -> LpVector {
    let factor = rng.random_range(lo..hi);
    (factor * r) * &unit_vector(rng, dim, p)
}

pub fn gaussian_function<R: Rng>(rng: &mut R, space: &Arc<MeasureSpace>) -> StepFunction {
    StepFunction::new(space.clone(), gaussian_values(rng, space.len()))
        .expect("gaussian values are finite")
}

/// Values `|N(0,1)|`, a point of the positive cone.
pub fn nonnegative_function<R: Rng>(rng: &mut R, space: &Arc<MeasureSpace>) -> StepFunction {
    gaussian_function(rng, space).map(f64::abs)
}
