//! Seeded random sources. Every generator in the crate takes an explicit seed;
//! there is no shared RNG state.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{CVec, RVec};

use super::FieldKind;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine a base seed with an ordered list of keys into a child seed.
pub fn derive_seed(base: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(mix64(base), |acc, &k| mix64(acc ^ mix64(k)))
}

pub fn gaussian(rng: &mut SeededRng) -> f64 {
    rng.sample(StandardNormal)
}

/// One draw from N(0,1) (real) or N(0,1/2) + i N(0,1/2) (complex).
pub fn field_gaussian(rng: &mut SeededRng, field: FieldKind) -> Complex64 {
    match field {
        FieldKind::Real => Complex64::new(gaussian(rng), 0.0),
        FieldKind::Complex => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let re = gaussian(rng) * s;
            let im = gaussian(rng) * s;
            Complex64::new(re, im)
        }
    }
}

pub fn gaussian_vector(rng: &mut SeededRng, len: usize, field: FieldKind) -> CVec {
    CVec::from_fn(len, |_, _| field_gaussian(rng, field))
}

pub fn real_gaussian_vector(rng: &mut SeededRng, len: usize) -> RVec {
    RVec::from_fn(len, |_, _| gaussian(rng))
}
