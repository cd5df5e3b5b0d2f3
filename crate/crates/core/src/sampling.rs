//! Seeded random points for empirical certificates and property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::Vector;

/// Deterministic generator used everywhere a seed is accepted.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A vector with i.i.d. standard normal entries scaled by `scale`.
pub fn normal_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> Vector {
    Vector::from_raw(
        (0..dim)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect(),
    )
}

/// A point drawn uniformly from the unit sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v = normal_vector(rng, dim, 1.0);
        let n = v.norm();
        if n > 1e-12 {
            return v.scale(1.0 / n);
        }
    }
}
