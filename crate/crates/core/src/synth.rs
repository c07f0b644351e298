//! Seeded synthetic noise for round-trip studies.

use crate::error::{GseError, Result};
use crate::model::Spectrum;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Adds independent Gaussian noise of standard deviation `sigma` to the real
/// and imaginary parts of every point. The same seed always gives the same
/// output.
pub fn add_complex_noise(spectrum: &Spectrum, sigma: f64, seed: u64) -> Result<Spectrum> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(GseError::InvalidInput(format!("noise sigma must be finite and >= 0, got {sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).map_err(|e| GseError::InvalidInput(e.to_string()))?;
    let s21 = spectrum
        .s21
        .iter()
        .map(|z| z + Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
        .collect();
    Spectrum::new(spectrum.frequencies.clone(), s21)
}
