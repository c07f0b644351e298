//! Closed-form observables of one two-point giant spin ensemble.
//!
//! Lamb-shift sign: the resonance sits at `f_res + κ sin φ`, as obtained from the
//! steady-state Heisenberg equation of a single ensemble.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, GseError, Result};
use crate::model::{field_to_frequency, phase_unchecked, FrequencyGrid, Spectrum, Waveguide};
use crate::par::par_map;

/// Where the propagation phase is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMode {
    /// At the emitter resonance, `φ = 2π f_res L / v`.
    #[default]
    Resonance,
    /// At each probe frequency.
    Probe,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleGseParams {
    /// Radiative rate per coupling point, Hz.
    pub kappa: f64,
    /// Intrinsic rate, Hz.
    pub beta: f64,
    /// Distance between the two coupling points, m.
    pub length: f64,
    /// Resonance frequency, Hz.
    pub f_res: f64,
    pub waveguide: Waveguide,
}

impl SingleGseParams {
    pub fn new(kappa: f64, beta: f64, length: f64, f_res: f64, waveguide: Waveguide) -> Result<Self> {
        let p = Self {
            kappa,
            beta,
            length,
            f_res,
            waveguide,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa", self.kappa),
            ("beta", self.beta),
            ("length", self.length),
            ("f_res", self.f_res),
        ] {
            ensure_finite(name, v)?;
        }
        if self.kappa < 0.0 || self.beta < 0.0 {
            return Err(GseError::InvalidInput("rates must be non-negative".into()));
        }
        if self.length <= 0.0 {
            return Err(GseError::InvalidInput("length must be positive".into()));
        }
        if self.f_res <= 0.0 {
            return Err(GseError::InvalidInput("f_res must be positive".into()));
        }
        Waveguide::new(self.waveguide.speed)?;
        Ok(())
    }

    pub fn phase_at(&self, f: f64) -> f64 {
        phase_unchecked(f, self.length, self.waveguide.speed)
    }

    /// Interference period of the decay rate in frequency, `v / L`.
    pub fn period(&self) -> f64 {
        self.waveguide.speed / self.length
    }

    pub fn with_f_res(&self, f_res: f64) -> Self {
        Self { f_res, ..*self }
    }

    fn phase_for(&self, f: f64, mode: PhaseMode) -> f64 {
        match mode {
            PhaseMode::Resonance => self.phase_at(self.f_res),
            PhaseMode::Probe => self.phase_at(f),
        }
    }
}

/// Interference-modulated radiative rate `2κ(1 + cos φ)`, with φ taken at `at_f`.
pub fn giant_decay(p: &SingleGseParams, at_f: f64) -> f64 {
    decay_from_phase(p.kappa, p.phase_at(at_f))
}

/// Signed Lamb shift `κ sin φ`, with φ taken at `at_f`.
pub fn lamb_shift(p: &SingleGseParams, at_f: f64) -> f64 {
    p.kappa * p.phase_at(at_f).sin()
}

#[inline]
pub(crate) fn decay_from_phase(kappa: f64, phi: f64) -> f64 {
    2.0 * kappa * (1.0 + phi.cos())
}

/// Transmission at one probe frequency; `None` at the singular point
/// (vanishing total linewidth probed exactly on resonance).
pub fn s21_at(p: &SingleGseParams, f: f64, mode: PhaseMode) -> Option<Complex64> {
    let phi = p.phase_for(f, mode);
    let kappa_g = decay_from_phase(p.kappa, phi);
    let detuning = f - p.f_res - p.kappa * phi.sin();
    let denom = Complex64::new(-(kappa_g + p.beta), detuning);
    if denom.norm() == 0.0 {
        return None;
    }
    Some(1.0 + kappa_g / denom)
}

pub fn s21_single(p: &SingleGseParams, grid: &FrequencyGrid, mode: PhaseMode) -> Result<Spectrum> {
    p.validate()?;
    let frequencies = grid.frequencies();
    let mut singular = Vec::new();
    let s21 = frequencies
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            s21_at(p, f, mode).unwrap_or_else(|| {
                singular.push(k);
                Complex64::new(1.0, 0.0)
            })
        })
        .collect();
    let mut spectrum = Spectrum::new(frequencies, s21)?;
    spectrum.singular = singular;
    Ok(spectrum)
}

/// One column of a swept transmission map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapColumn {
    pub sweep_value: f64,
    pub spectrum: Spectrum,
}

/// Transmission spectra stacked along a swept control parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMap {
    pub columns: Vec<MapColumn>,
}

/// Long-format map row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapRow {
    pub sweep_value: f64,
    pub frequency: f64,
    pub magnitude: f64,
    pub db: f64,
}

impl TransmissionMap {
    pub fn rows(&self) -> impl Iterator<Item = MapRow> + '_ {
        self.columns.iter().flat_map(|c| {
            c.spectrum
                .frequencies
                .iter()
                .zip(&c.spectrum.s21)
                .map(move |(&f, v)| MapRow {
                    sweep_value: c.sweep_value,
                    frequency: f,
                    magnitude: v.norm(),
                    db: crate::model::to_db(v.norm()),
                })
        })
    }
}

/// Spectra versus bias field: each column sets `f_res = (γ/2π)(B + H_A)`.
pub fn map_single_vs_field(
    p: &SingleGseParams,
    fields: &[f64],
    anisotropy: f64,
    grid: &FrequencyGrid,
    mode: PhaseMode,
) -> Result<TransmissionMap> {
    let columns = par_map(fields, |&b| -> Result<MapColumn> {
        let f_res = field_to_frequency(b, anisotropy)?;
        Ok(MapColumn {
            sweep_value: b,
            spectrum: s21_single(&p.with_f_res(f_res), grid, mode)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(TransmissionMap { columns })
}
