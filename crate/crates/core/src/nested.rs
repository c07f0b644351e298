//! Two giant ensembles in the nested layout: the inner pair of coupling points
//! sits strictly between the outer pair.
//!
//! ```text
//!  outer 1      inner 1        inner 2      outer 2
//!     o------------i--------------i------------o
//!        phi1          phi2          phi3
//! ```

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, GseError, Result};
use crate::model::{FrequencyGrid, Spectrum, Waveguide};
use crate::par::par_map;
use crate::single::{decay_from_phase, MapColumn, PhaseMode, SingleGseParams, TransmissionMap};

/// Sign attached to the Lamb shift in the complex frequencies of the two ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambSign {
    /// Resonance pulled to `f + κ sin φ`, matching the single-ensemble result
    /// and the coupled Heisenberg equations.
    #[default]
    Heisenberg,
    /// Resonance at `f − κ sin φ`, the sign printed in the closed-form complex
    /// frequencies of the nested solution.
    Printed,
}

impl LambSign {
    fn factor(self) -> f64 {
        match self {
            LambSign::Heisenberg => 1.0,
            LambSign::Printed => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestedParams {
    pub inner: SingleGseParams,
    pub outer: SingleGseParams,
    /// Outer-left to inner-left, rad.
    pub phi1: f64,
    /// Inner span, rad.
    pub phi2: f64,
    /// Inner-right to outer-right, rad.
    pub phi3: f64,
    pub lamb_sign: LambSign,
}

impl NestedParams {
    /// Symmetric device built from lengths. The inter-ensemble phases are taken
    /// at the mean of the two resonance frequencies.
    pub fn symmetric(inner: SingleGseParams, outer: SingleGseParams) -> Result<Self> {
        check_pair(&inner, &outer)?;
        let f_ref = 0.5 * (inner.f_res + outer.f_res);
        let (phi1, phi2, phi3) = geometric_phases(&inner, &outer, f_ref);
        Ok(Self {
            inner,
            outer,
            phi1,
            phi2,
            phi3,
            lamb_sign: LambSign::default(),
        })
    }

    pub fn with_phases(
        inner: SingleGseParams,
        outer: SingleGseParams,
        phi1: f64,
        phi2: f64,
        phi3: f64,
    ) -> Result<Self> {
        check_pair(&inner, &outer)?;
        for (name, v) in [("phi1", phi1), ("phi2", phi2), ("phi3", phi3)] {
            ensure_finite(name, v)?;
            if v < 0.0 {
                return Err(GseError::InvalidInput(format!("{name} must be non-negative")));
            }
        }
        Ok(Self {
            inner,
            outer,
            phi1,
            phi2,
            phi3,
            lamb_sign: LambSign::default(),
        })
    }

    pub fn waveguide(&self) -> Waveguide {
        self.inner.waveguide
    }

    /// Square root of the product of the per-point rates.
    pub fn geometric_kappa(&self) -> f64 {
        (self.inner.kappa * self.outer.kappa).sqrt()
    }

    /// True when `√(κ_o κ_i) > max{κ_iG + β_i, β_o}`, the condition for the
    /// waveguide-mediated coherent coupling to resolve into a splitting.
    pub fn is_strongly_coupled(&self) -> bool {
        let kig = decay_from_phase(self.inner.kappa, self.inner.phase_at(self.inner.f_res));
        self.geometric_kappa() > (kig + self.inner.beta).max(self.outer.beta)
    }
}

fn check_pair(inner: &SingleGseParams, outer: &SingleGseParams) -> Result<()> {
    inner.validate()?;
    outer.validate()?;
    if inner.waveguide != outer.waveguide {
        return Err(GseError::InvalidInput("inner and outer must share a waveguide".into()));
    }
    if !(outer.length > inner.length) {
        return Err(GseError::InvalidInput(
            "nesting requires the outer span to exceed the inner span".into(),
        ));
    }
    Ok(())
}

fn geometric_phases(inner: &SingleGseParams, outer: &SingleGseParams, f: f64) -> (f64, f64, f64) {
    let k = TAU * f / inner.waveguide.speed;
    let side = 0.5 * (outer.length - inner.length);
    (k * side, k * inner.length, k * side)
}

/// Waveguide-mediated coupling `J − iΓ` between the two ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    /// Coherent part, Hz.
    pub j: f64,
    /// Dissipative part, Hz.
    pub gamma: f64,
}

impl Couplings {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.j, -self.gamma)
    }
}

/// General four-term coupling for arbitrary `phi1`, `phi2`, `phi3`.
pub fn coupling_from_phases(kappa_i: f64, kappa_o: f64, phi1: f64, phi2: f64, phi3: f64) -> Couplings {
    let g = (kappa_i * kappa_o).sqrt();
    let a = phi1;
    let b = phi3;
    let c = phi1 + phi2;
    let d = phi2 + phi3;
    Couplings {
        gamma: g * (a.cos() + b.cos() + c.cos() + d.cos()),
        j: 0.5 * g * (a.sin() + b.sin() + c.sin() + d.sin()),
    }
}

pub fn coupling_strengths(p: &NestedParams) -> Couplings {
    coupling_from_phases(p.inner.kappa, p.outer.kappa, p.phi1, p.phi2, p.phi3)
}

/// Complex frequencies and coupling of the effective two-mode model, Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTwoMode {
    pub omega_i: Complex64,
    pub omega_o: Complex64,
    /// `J − iΓ`.
    pub coupling: Complex64,
}

fn complex_frequency(p: &SingleGseParams, phi: f64, sign: LambSign) -> Complex64 {
    Complex64::new(
        p.f_res + sign.factor() * p.kappa * phi.sin(),
        -(decay_from_phase(p.kappa, phi) + p.beta),
    )
}

/// Effective model with every phase taken at the emitters' resonances.
pub fn effective_two_mode(p: &NestedParams) -> EffectiveTwoMode {
    EffectiveTwoMode {
        omega_i: complex_frequency(&p.inner, p.inner.phase_at(p.inner.f_res), p.lamb_sign),
        omega_o: complex_frequency(&p.outer, p.outer.phase_at(p.outer.f_res), p.lamb_sign),
        coupling: coupling_strengths(p).complex(),
    }
}

fn effective_at_probe(p: &NestedParams, f: f64) -> EffectiveTwoMode {
    let (phi1, phi2, phi3) = geometric_phases(&p.inner, &p.outer, f);
    EffectiveTwoMode {
        omega_i: complex_frequency(&p.inner, p.inner.phase_at(f), p.lamb_sign),
        omega_o: complex_frequency(&p.outer, p.outer.phase_at(f), p.lamb_sign),
        coupling: coupling_from_phases(p.inner.kappa, p.outer.kappa, phi1, phi2, phi3).complex(),
    }
}

/// Probe-frequency coupling vectors `(outer, inner)` for the right-moving wave.
/// Drive vector ordered (outer, inner); `Resonance` mode takes each entry's
/// phases at that ensemble's resonance.
fn drive_vector(p: &NestedParams, f: f64, mode: PhaseMode) -> [Complex64; 2] {
    let v = p.waveguide().speed;
    let (f_o, f_i) = match mode {
        PhaseMode::Resonance => (p.outer.f_res, p.inner.f_res),
        PhaseMode::Probe => (f, f),
    };
    let lo = p.outer.length;
    let li = p.inner.length;
    let e = |f: f64, x: f64| Complex64::from_polar(1.0, TAU * f / v * x);
    [
        p.outer.kappa.sqrt() * (1.0 + e(f_o, lo)),
        p.inner.kappa.sqrt() * (e(f_i, 0.5 * (lo - li)) + e(f_i, 0.5 * (lo + li))),
    ]
}

/// Transmission and reflection at one probe frequency, or `None` when the
/// resolvent determinant underflows.
pub fn nested_response(p: &NestedParams, f: f64, mode: PhaseMode) -> Option<(Complex64, Complex64)> {
    let eff = match mode {
        PhaseMode::Resonance => effective_two_mode(p),
        PhaseMode::Probe => effective_at_probe(p, f),
    };
    let w = drive_vector(p, f, mode);
    let u = [w[0].conj(), w[1].conj()];
    // [[f - ω_o, -(J - iΓ)], [-(J - iΓ), f - ω_i]], ordered (outer, inner)
    let a = f - eff.omega_o;
    let d = f - eff.omega_i;
    let b = -eff.coupling;
    let det = a * d - b * b;
    if det.norm() < 1e-300 {
        return None;
    }
    let inv = [[d / det, -b / det], [-b / det, a / det]];
    let apply = |x: [Complex64; 2]| {
        [
            inv[0][0] * x[0] + inv[0][1] * x[1],
            inv[1][0] * x[0] + inv[1][1] * x[1],
        ]
    };
    let gw = apply(w);
    let i = Complex64::i();
    let t = 1.0 - i * (u[0] * gw[0] + u[1] * gw[1]);
    let r = -i * (w[0] * gw[0] + w[1] * gw[1]);
    Some((t, r))
}

/// Matrix-form transmission `1 − i u (f − H)^{-1} w`. In `Resonance` mode the
/// complex frequencies, the coupling and the drive vectors use the resonance
/// phases; in `Probe` mode every phase follows the probe frequency.
pub fn s21_nested_matrix(p: &NestedParams, grid: &FrequencyGrid, mode: PhaseMode) -> Result<Spectrum> {
    let frequencies = grid.frequencies();
    let mut singular = Vec::new();
    let s21 = frequencies
        .iter()
        .enumerate()
        .map(|(k, &f)| match nested_response(p, f, mode) {
            Some((t, _)) => t,
            None => {
                singular.push(k);
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    let mut s = Spectrum::new(frequencies, s21)?;
    s.singular = singular;
    Ok(s)
}

/// Parameters of the eight-parameter rational two-mode transmission, all Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitFormParams {
    pub f_i: f64,
    pub f_o: f64,
    pub kappa_ig: f64,
    pub kappa_og: f64,
    pub beta_i: f64,
    pub beta_o: f64,
    pub j: f64,
    pub gamma: f64,
}

impl FitFormParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("f_i", self.f_i),
            ("f_o", self.f_o),
            ("kappa_ig", self.kappa_ig),
            ("kappa_og", self.kappa_og),
            ("beta_i", self.beta_i),
            ("beta_o", self.beta_o),
            ("j", self.j),
            ("gamma", self.gamma),
        ] {
            ensure_finite(name, v)?;
        }
        if [self.kappa_ig, self.kappa_og, self.beta_i, self.beta_o]
            .iter()
            .any(|&r| r < 0.0)
        {
            return Err(GseError::InvalidInput("rates must be non-negative".into()));
        }
        Ok(())
    }

    pub fn total_inner(&self) -> f64 {
        self.kappa_ig + self.beta_i
    }

    pub fn total_outer(&self) -> f64 {
        self.kappa_og + self.beta_o
    }

    pub fn with_f_o(&self, f_o: f64) -> Self {
        Self { f_o, ..*self }
    }
}

pub fn s21_fitform_at(p: &FitFormParams, f: f64) -> Complex64 {
    let i = Complex64::i();
    let a = Complex64::new(f - p.f_o, p.total_outer());
    let d = Complex64::new(f - p.f_i, p.total_inner());
    let c = Complex64::new(p.j, -p.gamma);
    let num = 2.0 * i * (p.kappa_ig * p.kappa_og).sqrt() * c + i * p.kappa_ig * a + i * p.kappa_og * d;
    let den = a * d - (-c) * (-c);
    1.0 - num / den
}

pub fn s21_nested_fitform(p: &FitFormParams, grid: &FrequencyGrid) -> Result<Spectrum> {
    p.validate()?;
    let frequencies = grid.frequencies();
    let s21 = frequencies.iter().map(|&f| s21_fitform_at(p, f)).collect();
    Spectrum::new(frequencies, s21)
}

/// Two eigenvalue branches followed across a sweep of the outer frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenTraces {
    pub sweep: Vec<f64>,
    pub branches: Vec<[Complex64; 2]>,
    /// Sweep indices where the two eigenvalues (nearly) coincide.
    pub exceptional: Vec<usize>,
}

impl EigenTraces {
    pub fn real_splitting(&self, k: usize) -> f64 {
        (self.branches[k][0].re - self.branches[k][1].re).abs()
    }
}

/// Eigenpairs of `[[f_i − iκ_iT, J − iΓ], [J − iΓ, f_o − iκ_oT]]`, relative to `f_i`.
fn eigenpairs(p: &FitFormParams) -> ([Complex64; 2], [[Complex64; 2]; 2]) {
    let a = Complex64::new(0.0, -p.total_inner());
    let d = Complex64::new(p.f_o - p.f_i, -p.total_outer());
    let c = Complex64::new(p.j, -p.gamma);
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let root = (half * half + c * c).sqrt();
    let lambdas = [mean + root, mean - root];
    let vectors = lambdas.map(|l| {
        // rows of (M − λ) give two candidate null vectors; keep the larger one
        let v1 = [c, l - a];
        let v2 = [l - d, c];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        if n == 0.0 {
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            let s = n.sqrt();
            [v[0] / s, v[1] / s]
        }
    });
    (lambdas, vectors)
}

fn overlap(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm()
}

pub fn eigen_traces(p: &FitFormParams, f_o_sweep: &[f64]) -> Result<EigenTraces> {
    p.validate()?;
    if f_o_sweep.is_empty() {
        return Err(GseError::InvalidInput("eigenvalue sweep is empty".into()));
    }
    let scale = p.total_inner() + p.total_outer() + p.j.abs() + p.gamma.abs();
    let mut branches = Vec::with_capacity(f_o_sweep.len());
    let mut exceptional = Vec::new();
    let mut prev: Option<([Complex64; 2], [[Complex64; 2]; 2])> = None;
    for (k, &f_o) in f_o_sweep.iter().enumerate() {
        let (mut l, mut v) = eigenpairs(&p.with_f_o(f_o));
        let degenerate = (l[0] - l[1]).norm() <= 1e-9 * scale.max(f64::MIN_POSITIVE);
        if degenerate {
            exceptional.push(k);
        }
        if let Some((pl, pv)) = prev {
            let keep = if degenerate {
                (l[0] - pl[0]).norm() + (l[1] - pl[1]).norm()
                    <= (l[1] - pl[0]).norm() + (l[0] - pl[1]).norm()
            } else {
                overlap(&pv[0], &v[0]) + overlap(&pv[1], &v[1])
                    >= overlap(&pv[0], &v[1]) + overlap(&pv[1], &v[0])
            };
            if !keep {
                l.swap(0, 1);
                v.swap(0, 1);
            }
        }
        prev = Some((l, v));
        branches.push(l.map(|x| x + p.f_i));
    }
    Ok(EigenTraces {
        sweep: f_o_sweep.to_vec(),
        branches,
        exceptional,
    })
}

/// Which nested model a detuning map evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NestedModel {
    FitForm(FitFormParams),
    Matrix(NestedParams, PhaseMode),
}

/// Spectra versus the outer ensemble's resonance frequency.
pub fn map_nested_vs_detuning(
    model: &NestedModel,
    f_o_values: &[f64],
    grid: &FrequencyGrid,
) -> Result<TransmissionMap> {
    let columns = par_map(f_o_values, |&f_o| -> Result<MapColumn> {
        let spectrum = match model {
            NestedModel::FitForm(p) => s21_nested_fitform(&p.with_f_o(f_o), grid)?,
            NestedModel::Matrix(p, mode) => {
                let mut q = *p;
                q.outer = q.outer.with_f_res(f_o);
                s21_nested_matrix(&q, grid, *mode)?
            }
        };
        Ok(MapColumn {
            sweep_value: f_o,
            spectrum,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(TransmissionMap { columns })
}
