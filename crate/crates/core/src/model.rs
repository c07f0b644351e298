//! Domain types shared by every scattering module.
//!
//! Rates and frequencies are ordinary (linear) frequencies in Hz throughout,
//! i.e. the quantity usually quoted as `ω/2π`. Formulas written in terms of
//! angular frequency convert with `ω = 2πf` where the phase is formed.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, GseError, Result};

/// Default gyromagnetic ratio γ/2π in Hz/T.
pub const GYROMAGNETIC_HZ_PER_T: f64 = 28.0e9;

/// One spin ensemble touching the waveguide at one or more points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Emitter {
    pub name: String,
    /// Resonance frequency, Hz.
    pub f_res: f64,
    /// Intrinsic (non-radiative) rate, Hz.
    pub beta: f64,
    /// Radiative rate contributed by each coupling point, Hz.
    pub kappa_points: Vec<f64>,
    /// Coupling-point coordinates along the waveguide, metres, strictly increasing.
    pub positions: Vec<f64>,
}

impl Emitter {
    pub fn new(
        name: impl Into<String>,
        f_res: f64,
        beta: f64,
        kappa_points: Vec<f64>,
        positions: Vec<f64>,
    ) -> Result<Self> {
        let emitter = Self {
            name: name.into(),
            f_res,
            beta,
            kappa_points,
            positions,
        };
        emitter.validate()?;
        Ok(emitter)
    }

    /// Two coupling points of equal strength separated by `length`, the left one at `left`.
    pub fn two_point(
        name: impl Into<String>,
        f_res: f64,
        beta: f64,
        kappa: f64,
        left: f64,
        length: f64,
    ) -> Result<Self> {
        Self::new(name, f_res, beta, vec![kappa, kappa], vec![left, left + length])
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("f_res", self.f_res)?;
        ensure_finite("beta", self.beta)?;
        if self.f_res <= 0.0 {
            return Err(GseError::InvalidInput(format!(
                "emitter '{}': f_res must be positive",
                self.name
            )));
        }
        if self.beta < 0.0 {
            return Err(GseError::InvalidInput(format!(
                "emitter '{}': beta must be non-negative",
                self.name
            )));
        }
        if self.positions.is_empty() {
            return Err(GseError::InvalidInput(format!(
                "emitter '{}' has no coupling points",
                self.name
            )));
        }
        if self.kappa_points.len() != self.positions.len() {
            return Err(GseError::InvalidInput(format!(
                "emitter '{}': {} rates for {} positions",
                self.name,
                self.kappa_points.len(),
                self.positions.len()
            )));
        }
        for (&k, &x) in self.kappa_points.iter().zip(&self.positions) {
            ensure_finite("kappa", k)?;
            ensure_finite("position", x)?;
            if k < 0.0 {
                return Err(GseError::InvalidInput(format!(
                    "emitter '{}': negative coupling rate {k}",
                    self.name
                )));
            }
        }
        for pair in self.positions.windows(2) {
            if pair[1] == pair[0] {
                return Err(GseError::DuplicatePosition { position: pair[0] });
            }
            if pair[1] < pair[0] {
                return Err(GseError::InvalidInput(format!(
                    "emitter '{}': positions must be strictly increasing",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Span `[first, last]` of the coupling points.
    pub fn interval(&self) -> (f64, f64) {
        (self.positions[0], *self.positions.last().unwrap())
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.positions.iter().copied().zip(self.kappa_points.iter().copied())
    }
}

/// Non-dispersive waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waveguide {
    /// Propagation speed, m/s.
    pub speed: f64,
}

impl Waveguide {
    pub fn new(speed: f64) -> Result<Self> {
        ensure_finite("speed", speed)?;
        if speed <= 0.0 {
            return Err(GseError::InvalidInput("waveguide speed must be positive".into()));
        }
        Ok(Self { speed })
    }

    /// Travel time over `length` metres.
    pub fn delay(&self, length: f64) -> f64 {
        length / self.speed
    }
}

/// Propagation phase of a photon at frequency `f` over `length`, unreduced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub radians: f64,
}

impl Phase {
    /// Phase folded into `[0, 2π)`.
    pub fn reduced(&self) -> f64 {
        let r = self.radians.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if r >= TAU {
            0.0
        } else {
            r
        }
    }

    pub fn cycles(&self) -> f64 {
        self.radians / TAU
    }
}

pub fn phase(f: f64, length: f64, waveguide: &Waveguide) -> Result<Phase> {
    ensure_finite("frequency", f)?;
    ensure_finite("length", length)?;
    if f < 0.0 {
        return Err(GseError::InvalidInput("frequency must be non-negative".into()));
    }
    if length < 0.0 {
        return Err(GseError::InvalidInput("length must be non-negative".into()));
    }
    Ok(Phase {
        radians: phase_unchecked(f, length, waveguide.speed),
    })
}

#[inline]
pub(crate) fn phase_unchecked(f: f64, length: f64, speed: f64) -> f64 {
    TAU * f * length / speed
}

/// Kittel-mode frequency `(γ/2π)(B + H_A)` for a bias field and an anisotropy field, both in tesla.
pub fn field_to_frequency(bias: f64, anisotropy: f64) -> Result<f64> {
    field_to_frequency_with(bias, anisotropy, GYROMAGNETIC_HZ_PER_T)
}

pub fn field_to_frequency_with(bias: f64, anisotropy: f64, gamma_hz_per_t: f64) -> Result<f64> {
    ensure_finite("bias field", bias)?;
    ensure_finite("anisotropy field", anisotropy)?;
    let f = gamma_hz_per_t * (bias + anisotropy);
    if !(f > 0.0) {
        return Err(GseError::NonPhysical(format!(
            "resonance frequency {f} Hz is not positive"
        )));
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Single,
    Nested,
    Braided,
    Separate,
    General,
}

/// A set of emitters sharing one waveguide.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    emitters: Vec<Emitter>,
    classification: Classification,
}

impl Topology {
    pub fn new(emitters: Vec<Emitter>) -> Result<Self> {
        if emitters.is_empty() {
            return Err(GseError::InvalidInput("topology has no emitters".into()));
        }
        for e in &emitters {
            e.validate()?;
        }
        let mut all: Vec<f64> = emitters.iter().flat_map(|e| e.positions.iter().copied()).collect();
        all.sort_by(|a, b| a.total_cmp(b));
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(GseError::DuplicatePosition { position: w[0] });
        }
        let classification = classify(&emitters);
        Ok(Self {
            emitters,
            classification,
        })
    }

    pub fn emitters(&self) -> &[Emitter] {
        &self.emitters
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }
}

/// Classifies the interleaving pattern of the emitters' coupling intervals.
pub fn classify_topology(t: &Topology) -> Classification {
    t.classification
}

fn classify(emitters: &[Emitter]) -> Classification {
    match emitters {
        [_] => Classification::Single,
        [a, b] if a.positions.len() <= 2 && b.positions.len() <= 2 => {
            let (a1, a2) = a.interval();
            let (b1, b2) = b.interval();
            let contains = |o1: f64, o2: f64, i1: f64, i2: f64| o1 < i1 && i2 < o2;
            if contains(a1, a2, b1, b2) || contains(b1, b2, a1, a2) {
                Classification::Nested
            } else if a2 < b1 || b2 < a1 {
                Classification::Separate
            } else {
                Classification::Braided
            }
        }
        _ => Classification::General,
    }
}

/// Uniform probe-frequency grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub f_start: f64,
    pub f_stop: f64,
    pub n_points: usize,
}

impl FrequencyGrid {
    pub fn new(f_start: f64, f_stop: f64, n_points: usize) -> Result<Self> {
        ensure_finite("f_start", f_start)?;
        ensure_finite("f_stop", f_stop)?;
        if !(f_start > 0.0) || !(f_stop > f_start) {
            return Err(GseError::InvalidInput(format!(
                "grid needs 0 < f_start < f_stop, got [{f_start}, {f_stop}]"
            )));
        }
        if n_points < 2 {
            return Err(GseError::InvalidInput("grid needs at least 2 points".into()));
        }
        Ok(Self {
            f_start,
            f_stop,
            n_points,
        })
    }

    /// Grid of `n_points` centred on `center` spanning `±half_span`.
    pub fn centered(center: f64, half_span: f64, n_points: usize) -> Result<Self> {
        Self::new(center - half_span, center + half_span, n_points)
    }

    pub fn frequency(&self, k: usize) -> f64 {
        if k + 1 == self.n_points {
            return self.f_stop;
        }
        self.f_start + (self.f_stop - self.f_start) * (k as f64) / ((self.n_points - 1) as f64)
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.frequency(k)).collect()
    }

    pub fn step(&self) -> f64 {
        (self.f_stop - self.f_start) / ((self.n_points - 1) as f64)
    }
}

/// Complex transmission sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub s21: Vec<Complex64>,
    /// Indices of points where the model was singular; their value is set to 1.
    pub singular: Vec<usize>,
}

impl Spectrum {
    pub fn new(frequencies: Vec<f64>, s21: Vec<Complex64>) -> Result<Self> {
        if frequencies.len() != s21.len() {
            return Err(GseError::InvalidInput(format!(
                "{} frequencies for {} values",
                frequencies.len(),
                s21.len()
            )));
        }
        if let Some(v) = s21.iter().find(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(GseError::InvalidInput(format!("non-finite transmission value {v}")));
        }
        Ok(Self {
            frequencies,
            s21,
            singular: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.s21.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s21.is_empty()
    }

    pub fn magnitude(&self) -> Vec<f64> {
        self.s21.iter().map(|v| v.norm()).collect()
    }

    pub fn db(&self) -> Vec<f64> {
        self.s21.iter().map(|v| to_db(v.norm())).collect()
    }

    /// Reflection channel `S21 − 1` of a symmetric two-port.
    pub fn reflection(&self) -> Vec<Complex64> {
        self.s21.iter().map(|v| v - 1.0).collect()
    }

    /// Index and value of the smallest `|S21|`.
    pub fn min_magnitude(&self) -> Option<(usize, f64)> {
        self.s21
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

pub fn to_db(magnitude: f64) -> f64 {
    20.0 * magnitude.log10()
}
