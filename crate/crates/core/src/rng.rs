//! Seeded randomness.
//!
//! Every random draw in the crate goes through a ChaCha8 stream keyed by a
//! master seed and a purpose tag, so two runs with the same seed agree bit
//! for bit regardless of thread scheduling.

use crate::prelude::*;
use core::f64::consts::TAU;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent stream identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Shifts = 1,
    StartGamma = 2,
    BeynProbe = 3,
    Problem = 4,
    Chart = 5,
}

/// Mixes a master seed with a sub-index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Creates the generator for `(seed, stream)`.
pub fn stream(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Uniform draw from the complex unit circle.
pub fn unit_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let angle: f64 = rng.gen::<f64>() * TAU;
    C64::from_polar(1.0, angle)
}

/// Standard complex normal draw (Box-Muller on each component).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    let radius = (-u1.ln()).sqrt();
    C64::from_polar(radius, TAU * u2)
}
