//! Seeded initial states.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_values<R: Rng + ?Sized>(lattice: Lattice, rng: &mut R) -> Vec<Complex64> {
    (0..lattice.sites)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// A state with uniformly random direction and ‖ψ‖ = `radius`.
pub fn random_on_sphere<R: Rng + ?Sized>(lattice: Lattice, radius: f64, rng: &mut R) -> Result<LatticeState> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::Domain(format!("radius must be non-negative, got {radius}")));
    }
    loop {
        let v = gaussian_values(lattice, rng);
        let norm = crate::lattice::norm_sqr(&v).sqrt();
        if norm > 0.0 {
            return Ok(LatticeState::from_raw(lattice, v.into_iter().map(|z| z * (radius / norm)).collect()));
        }
    }
}

/// A state drawn uniformly from the closed l² ball of the given radius.
pub fn random_in_ball<R: Rng + ?Sized>(lattice: Lattice, radius: f64, rng: &mut R) -> Result<LatticeState> {
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / (2 * lattice.sites) as f64);
    random_on_sphere(lattice, r, rng)
}

/// Reproducible state on the sphere of radius `radius`.
pub fn seeded_state(lattice: Lattice, radius: f64, seed: u64) -> Result<LatticeState> {
    random_on_sphere(lattice, radius, &mut rng(seed))
}
