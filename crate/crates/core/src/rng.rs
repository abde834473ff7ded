use core::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on [0, 2π).
pub(crate) fn uniform_angle<R: Rng>(rng: &mut R) -> f64 {
    let a = rng.random::<f64>() * TAU;
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Circularly-symmetric complex Gaussian with E[|z|²] = power.
pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R, power: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = power.sqrt() * FRAC_1_SQRT_2;
    Complex64::new(re * s, im * s)
}
