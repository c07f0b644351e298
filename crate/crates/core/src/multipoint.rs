//! Effective non-Hermitian model for any number of emitters with any number of
//! coupling points, and its scattering response.
//!
//! For emitters `j`, `l` with points `p`, `q` the waveguide-mediated term is
//!
//! ```text
//! Σ_pq √(κ_jp κ_lq) [ ½ sin(k|x_jp − x_lq|) − i cos(k|x_jp − x_lq|) ]
//! ```
//!
//! which gives `J_jl − iΓ_jl` off the diagonal and the Lamb shift minus `i` times
//! the giant decay rate on it. Transmission is `1 − i w† (f − H)^{-1} w` with
//! `w_j = Σ_p √κ_jp e^{ik x_jp}`; reflection is `−i wᵀ (f − H)^{-1} w`. In
//! `Resonance` mode every wavenumber, including the one in `w_j`, is taken at
//! the emitter resonances, so a lone two-point emitter gives exactly the
//! single-ensemble closed form.

use std::f64::consts::TAU;

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{GseError, Result};
use crate::model::{FrequencyGrid, Spectrum, Topology, Waveguide};
use crate::nested::Couplings;
use crate::single::PhaseMode;

/// Above this delay × linewidth product the Markovian closed forms lose validity.
pub const MARKOV_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
struct Site {
    f_res: f64,
    beta: f64,
    points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveModel {
    sites: Vec<Site>,
    speed: f64,
    /// Waveguide-mediated self-energy at the reference frequencies, Hz.
    sigma: DMatrix<Complex64>,
    /// Effective Hamiltonian at the reference frequencies, Hz.
    hamiltonian: DMatrix<Complex64>,
    /// Largest inter-point delay times largest total linewidth.
    pub markov_parameter: f64,
}

fn pair_term(sites: &[Site], j: usize, l: usize, f: f64, speed: f64) -> Complex64 {
    let k = TAU * f / speed;
    let mut sum = Complex64::new(0.0, 0.0);
    for &(xa, ka) in &sites[j].points {
        for &(xb, kb) in &sites[l].points {
            let g = (ka * kb).sqrt();
            let ph = k * (xa - xb).abs();
            sum += g * Complex64::new(0.5 * ph.sin(), -ph.cos());
        }
    }
    sum
}

/// Waveguide-mediated part only, kept apart from the bare frequencies so that
/// shifts of a few Hz are not lost against GHz diagonals.
fn self_energy(sites: &[Site], speed: f64, probe: Option<f64>) -> DMatrix<Complex64> {
    let n = sites.len();
    DMatrix::from_fn(n, n, |j, l| {
        let f_ref = probe.unwrap_or(0.5 * (sites[j].f_res + sites[l].f_res));
        pair_term(sites, j, l, f_ref, speed)
    })
}

fn with_bare(sites: &[Site], sigma: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut h = sigma.clone();
    for (j, s) in sites.iter().enumerate() {
        h[(j, j)] += Complex64::new(s.f_res, -s.beta);
    }
    h
}

/// Builds the effective model with each diagonal at its emitter's resonance and
/// each off-diagonal at the mean resonance of the pair.
pub fn build_effective(t: &Topology, waveguide: &Waveguide) -> Result<EffectiveModel> {
    let sites: Vec<Site> = t
        .emitters()
        .iter()
        .map(|e| {
            if e.positions.is_empty() {
                return Err(GseError::InvalidInput(format!(
                    "emitter '{}' has no coupling points",
                    e.name
                )));
            }
            Ok(Site {
                f_res: e.f_res,
                beta: e.beta,
                points: e.points().collect(),
            })
        })
        .collect::<Result<_>>()?;
    let speed = waveguide.speed;
    let sigma = self_energy(&sites, speed, None);
    let h = with_bare(&sites, &sigma);
    if h.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(GseError::NonPhysical("effective model has non-finite entries".into()));
    }
    let positions: Vec<f64> = sites.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let span = positions.iter().cloned().fold(f64::MIN, f64::max)
        - positions.iter().cloned().fold(f64::MAX, f64::min);
    let linewidth = (0..sites.len()).map(|j| -h[(j, j)].im).fold(0.0, f64::max);
    let markov_parameter = span / speed * linewidth;
    if markov_parameter > MARKOV_LIMIT {
        warn!(
            "delay x linewidth = {markov_parameter:.3} exceeds {MARKOV_LIMIT}; \
             the Markovian model is outside its validity range"
        );
    }
    Ok(EffectiveModel {
        sites,
        speed,
        sigma,
        hamiltonian: h,
        markov_parameter,
    })
}

impl EffectiveModel {
    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn hamiltonian(&self) -> &DMatrix<Complex64> {
        &self.hamiltonian
    }

    /// Complex self-energy of emitter `j` including its bare frequency.
    pub fn diag(&self, j: usize) -> Complex64 {
        self.hamiltonian[(j, j)]
    }

    /// Radiative (giant) decay rate of emitter `j`.
    pub fn radiative_rate(&self, j: usize) -> f64 {
        -self.sigma[(j, j)].im
    }

    pub fn lamb_shift(&self, j: usize) -> f64 {
        self.sigma[(j, j)].re
    }

    pub fn coupling(&self, j: usize, l: usize) -> Couplings {
        let c = self.sigma[(j, l)];
        Couplings { j: c.re, gamma: -c.im }
    }

    pub fn is_markovian(&self) -> bool {
        self.markov_parameter <= MARKOV_LIMIT
    }

    /// Right-moving drive vector. Its phases are taken at each emitter's own
    /// resonance in `Resonance` mode and at the probe frequency `f` otherwise.
    pub fn drive_vector(&self, f: f64, mode: PhaseMode) -> DVector<Complex64> {
        DVector::from_iterator(
            self.n(),
            self.sites.iter().map(|s| {
                let k = TAU * match mode {
                    PhaseMode::Resonance => s.f_res,
                    PhaseMode::Probe => f,
                } / self.speed;
                s.points
                    .iter()
                    .map(|&(x, kappa)| kappa.sqrt() * Complex64::from_polar(1.0, k * x))
                    .sum()
            }),
        )
    }

    /// Transmission and reflection at one frequency; `None` if the resolvent is singular.
    pub fn response(&self, f: f64, mode: PhaseMode) -> Option<(Complex64, Complex64)> {
        let sigma = match mode {
            PhaseMode::Resonance => self.sigma.clone(),
            PhaseMode::Probe => self_energy(&self.sites, self.speed, Some(f)),
        };
        let mut resolvent = -sigma;
        for (j, s) in self.sites.iter().enumerate() {
            resolvent[(j, j)] += Complex64::new(f - s.f_res, s.beta);
        }
        let w = self.drive_vector(f, mode);
        let g = resolvent.lu().solve(&w)?;
        if g.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return None;
        }
        let i = Complex64::i();
        let t = 1.0 - i * w.dotc(&g);
        let r = -i * w.dot(&g);
        Some((t, r))
    }
}

/// Transmission spectrum plus the reflection channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Scattering {
    pub transmission: Spectrum,
    pub reflection: Vec<Complex64>,
}

pub fn s_matrix(m: &EffectiveModel, grid: &FrequencyGrid, mode: PhaseMode) -> Result<Scattering> {
    if m.n() == 0 {
        return Err(GseError::InvalidInput("model has no emitters".into()));
    }
    let frequencies = grid.frequencies();
    let mut singular = Vec::new();
    let mut s21 = Vec::with_capacity(frequencies.len());
    let mut reflection = Vec::with_capacity(frequencies.len());
    for (k, &f) in frequencies.iter().enumerate() {
        match m.response(f, mode) {
            Some((t, r)) => {
                s21.push(t);
                reflection.push(r);
            }
            None => {
                singular.push(k);
                s21.push(Complex64::new(1.0, 0.0));
                reflection.push(Complex64::new(0.0, 0.0));
            }
        }
    }
    let mut transmission = Spectrum::new(frequencies, s21)?;
    transmission.singular = singular;
    Ok(Scattering {
        transmission,
        reflection,
    })
}
