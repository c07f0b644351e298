//! Least-squares parameter extraction from transmission spectra.
//!
//! The optimizer works in coordinates scaled by each parameter's initial
//! magnitude, so rates in Hz, lengths in metres and speeds in m/s share one
//! step size.

use crate::analysis::{half_depth_width, refine_extremum};
use crate::error::{GseError, Result};
use crate::model::{Spectrum, Waveguide};
use crate::nested::{s21_fitform_at, FitFormParams};
use crate::single::{decay_from_phase, s21_at, PhaseMode, SingleGseParams};
use log::{debug, warn};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Relative forward-difference step of the Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-6;
/// Eigenvalue floor of the normalised normal matrix below which parameter
/// combinations are declared unidentifiable.
pub const IDENTIFIABILITY_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Observations {
    Complex(Vec<Complex64>),
    Magnitude(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitData {
    pub frequencies: Vec<f64>,
    pub observations: Observations,
}

impl FitData {
    pub fn new(frequencies: Vec<f64>, observations: Observations) -> Result<Self> {
        let n = match &observations {
            Observations::Complex(v) => {
                if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(GseError::InvalidInput("observations must be finite".into()));
                }
                v.len()
            }
            Observations::Magnitude(v) => {
                if v.iter().any(|m| !m.is_finite() || *m < 0.0) {
                    return Err(GseError::InvalidInput("magnitudes must be finite and >= 0".into()));
                }
                v.len()
            }
        };
        if n != frequencies.len() {
            return Err(GseError::InvalidInput(format!(
                "{} frequencies but {n} observations",
                frequencies.len()
            )));
        }
        if let Some(k) = frequencies.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(GseError::InvalidInput(format!(
                "frequencies must be strictly increasing (index {})",
                k + 1
            )));
        }
        Ok(Self { frequencies, observations })
    }

    pub fn complex(spectrum: &Spectrum) -> Result<Self> {
        Self::new(spectrum.frequencies.clone(), Observations::Complex(spectrum.s21.clone()))
    }

    pub fn magnitude(spectrum: &Spectrum) -> Result<Self> {
        Self::new(spectrum.frequencies.clone(), Observations::Magnitude(spectrum.magnitude()))
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        match &self.observations {
            Observations::Complex(v) => v.iter().map(|z| z.norm()).collect(),
            Observations::Magnitude(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub initial: f64,
    #[serde(default = "neg_inf")]
    pub lower: f64,
    #[serde(default = "pos_inf")]
    pub upper: f64,
}

fn neg_inf() -> f64 {
    f64::NEG_INFINITY
}

fn pos_inf() -> f64 {
    f64::INFINITY
}

impl ParamSpec {
    pub fn new(name: &str, initial: f64) -> Self {
        Self { name: name.to_string(), initial, lower: f64::NEG_INFINITY, upper: f64::INFINITY }
    }

    pub fn bounded(name: &str, initial: f64, lower: f64, upper: f64) -> Self {
        Self { name: name.to_string(), initial, lower, upper }
    }

    fn scale(&self) -> f64 {
        if self.initial != 0.0 {
            self.initial.abs()
        } else if (self.upper - self.lower).is_finite() {
            0.5 * (self.upper - self.lower)
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Weighting {
    #[default]
    Uniform,
    /// Per-point standard deviations; residuals are divided by them.
    Sigma(Vec<f64>),
}

/// How magnitude-only data are compared with the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MagnitudeScale {
    #[default]
    Linear,
    Db,
}

/// Dressed single-resonance line: `1 − κ_G / (κ_G + β − i(f − f_center))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianParams {
    pub f_center: f64,
    pub kappa_g: f64,
    pub beta: f64,
}

pub fn s21_lorentzian_at(p: &LorentzianParams, f: f64) -> Complex64 {
    1.0 - p.kappa_g / Complex64::new(p.kappa_g + p.beta, -(f - p.f_center))
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitModel {
    Single { base: SingleGseParams, mode: PhaseMode },
    Lorentzian(LorentzianParams),
    Nested(FitFormParams),
}

const SINGLE_NAMES: [&str; 5] = ["kappa", "beta", "length", "speed", "f_res"];
const LORENTZIAN_NAMES: [&str; 3] = ["f_center", "kappa_g", "beta"];
const NESTED_NAMES: [&str; 8] = ["f_i", "f_o", "kappa_ig", "kappa_og", "beta_i", "beta_o", "j", "gamma"];

impl FitModel {
    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            FitModel::Single { .. } => &SINGLE_NAMES,
            FitModel::Lorentzian(_) => &LORENTZIAN_NAMES,
            FitModel::Nested(_) => &NESTED_NAMES,
        }
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        Some(match (self, name) {
            (FitModel::Single { base, .. }, "kappa") => base.kappa,
            (FitModel::Single { base, .. }, "beta") => base.beta,
            (FitModel::Single { base, .. }, "length") => base.length,
            (FitModel::Single { base, .. }, "speed") => base.waveguide.speed,
            (FitModel::Single { base, .. }, "f_res") => base.f_res,
            (FitModel::Lorentzian(p), "f_center") => p.f_center,
            (FitModel::Lorentzian(p), "kappa_g") => p.kappa_g,
            (FitModel::Lorentzian(p), "beta") => p.beta,
            (FitModel::Nested(p), "f_i") => p.f_i,
            (FitModel::Nested(p), "f_o") => p.f_o,
            (FitModel::Nested(p), "kappa_ig") => p.kappa_ig,
            (FitModel::Nested(p), "kappa_og") => p.kappa_og,
            (FitModel::Nested(p), "beta_i") => p.beta_i,
            (FitModel::Nested(p), "beta_o") => p.beta_o,
            (FitModel::Nested(p), "j") => p.j,
            (FitModel::Nested(p), "gamma") => p.gamma,
            _ => return None,
        })
    }

    fn set(&mut self, name: &str, v: f64) {
        match (self, name) {
            (FitModel::Single { base, .. }, "kappa") => base.kappa = v,
            (FitModel::Single { base, .. }, "beta") => base.beta = v,
            (FitModel::Single { base, .. }, "length") => base.length = v,
            (FitModel::Single { base, .. }, "speed") => base.waveguide = Waveguide { speed: v },
            (FitModel::Single { base, .. }, "f_res") => base.f_res = v,
            (FitModel::Lorentzian(p), "f_center") => p.f_center = v,
            (FitModel::Lorentzian(p), "kappa_g") => p.kappa_g = v,
            (FitModel::Lorentzian(p), "beta") => p.beta = v,
            (FitModel::Nested(p), "f_i") => p.f_i = v,
            (FitModel::Nested(p), "f_o") => p.f_o = v,
            (FitModel::Nested(p), "kappa_ig") => p.kappa_ig = v,
            (FitModel::Nested(p), "kappa_og") => p.kappa_og = v,
            (FitModel::Nested(p), "beta_i") => p.beta_i = v,
            (FitModel::Nested(p), "beta_o") => p.beta_o = v,
            (FitModel::Nested(p), "j") => p.j = v,
            (FitModel::Nested(p), "gamma") => p.gamma = v,
            _ => unreachable!("parameter names are checked before fitting"),
        }
    }

    /// Physical lower limit; `j` and `gamma` may take either sign.
    fn natural_lower(name: &str) -> f64 {
        match name {
            "j" | "gamma" => f64::NEG_INFINITY,
            _ => 0.0,
        }
    }

    /// Copy of the model with the named values substituted.
    pub fn with_values(&self, names: &[String], values: &[f64]) -> Result<FitModel> {
        let mut m = self.clone();
        for (n, &v) in names.iter().zip(values) {
            if m.value(n).is_none() {
                return Err(GseError::InvalidInput(format!("unknown parameter `{n}`")));
            }
            m.set(n, v);
        }
        Ok(m)
    }

    /// Transmission; NaN at a singular point so the optimizer rejects it.
    pub fn s21(&self, f: f64) -> Complex64 {
        match self {
            FitModel::Single { base, mode } => {
                s21_at(base, f, *mode).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            }
            FitModel::Lorentzian(p) => s21_lorentzian_at(p, f),
            FitModel::Nested(p) => s21_fitform_at(p, f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Largest cosine between the residual and a Jacobian column at a minimum.
    pub gradient_tolerance: f64,
    /// Relative cost decrease below which an accepted step ends the search.
    pub cost_tolerance: f64,
    /// Relative step size below which an accepted step ends the search.
    pub step_tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iterations: 200, gradient_tolerance: 1e-10, cost_tolerance: 1e-15, step_tolerance: 1e-13 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    pub data: FitData,
    pub model: FitModel,
    pub free: Vec<ParamSpec>,
    pub weighting: Weighting,
    pub scale: MagnitudeScale,
    pub options: FitOptions,
}

impl FitProblem {
    pub fn new(data: FitData, model: FitModel, free: Vec<ParamSpec>) -> Self {
        Self {
            data,
            model,
            free,
            weighting: Weighting::Uniform,
            scale: MagnitudeScale::Linear,
            options: FitOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    LevenbergMarquardt,
    NelderMead,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// `sqrt(Σ weighted residual²)`.
    pub residual_norm: f64,
    pub n_iter: usize,
    pub converged: bool,
    pub method: FitMethod,
    /// Residual norm of each dataset in a joint fit; empty otherwise.
    pub dataset_residuals: Vec<f64>,
}

impl FitResult {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|k| self.values[k])
    }

    pub fn sigma(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|k| self.sigmas[k])
    }

    pub fn report(&self) -> FitReport {
        FitReport {
            params: self.names.iter().cloned().zip(self.values.iter().copied()).collect(),
            sigmas: self.names.iter().cloned().zip(self.sigmas.iter().copied()).collect(),
            residual_norm: self.residual_norm,
            converged: self.converged,
            n_iter: self.n_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: BTreeMap<String, f64>,
    pub sigmas: BTreeMap<String, f64>,
    pub residual_norm: f64,
    pub converged: bool,
    pub n_iter: usize,
}

/// Effective bounds: the caller's box intersected with the physical range.
fn checked_specs(model: &FitModel, free: &[ParamSpec]) -> Result<Vec<ParamSpec>> {
    if free.is_empty() {
        return Err(GseError::InvalidInput("at least one free parameter is required".into()));
    }
    let mut out: Vec<ParamSpec> = Vec::with_capacity(free.len());
    for spec in free {
        if model.value(&spec.name).is_none() {
            return Err(GseError::InvalidInput(format!(
                "unknown parameter `{}`; expected one of {}",
                spec.name,
                model.parameter_names().join(", ")
            )));
        }
        if out.iter().any(|s| s.name == spec.name) {
            return Err(GseError::InvalidInput(format!("parameter `{}` listed twice", spec.name)));
        }
        let lower = spec.lower.max(FitModel::natural_lower(&spec.name));
        let upper = spec.upper;
        if !spec.initial.is_finite() || !(lower <= spec.initial && spec.initial <= upper) {
            return Err(GseError::InvalidInput(format!(
                "initial value {} of `{}` lies outside [{lower}, {upper}]",
                spec.initial, spec.name
            )));
        }
        out.push(ParamSpec { lower, upper, ..spec.clone() });
    }
    Ok(out)
}

fn observation_residuals(
    model: &FitModel,
    data: &FitData,
    weights: Option<&[f64]>,
    scale: MagnitudeScale,
    out: &mut Vec<f64>,
) {
    let weight = |k: usize| weights.map_or(1.0, |w| 1.0 / w[k]);
    match &data.observations {
        Observations::Complex(obs) => {
            for (k, (&f, z)) in data.frequencies.iter().zip(obs).enumerate() {
                let d = (model.s21(f) - z) * weight(k);
                out.push(d.re);
                out.push(d.im);
            }
        }
        Observations::Magnitude(obs) => {
            for (k, (&f, &m)) in data.frequencies.iter().zip(obs).enumerate() {
                let model_mag = model.s21(f).norm();
                let d = match scale {
                    MagnitudeScale::Linear => model_mag - m,
                    MagnitudeScale::Db => 20.0 * model_mag.log10() - 20.0 * m.log10(),
                };
                out.push(d * weight(k));
            }
        }
    }
}

/// Fits the free parameters of `problem.model` to `problem.data`.
pub fn fit(problem: &FitProblem) -> Result<FitResult> {
    let specs = checked_specs(&problem.model, &problem.free)?;
    let n_points = problem.data.len();
    if n_points < 2 * specs.len() {
        return Err(GseError::InvalidInput(format!(
            "{n_points} data points cannot constrain {} parameters",
            specs.len()
        )));
    }
    let weights = match &problem.weighting {
        Weighting::Uniform => None,
        Weighting::Sigma(s) => {
            if s.len() != n_points || s.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                return Err(GseError::InvalidInput(
                    "per-point sigmas must be positive and match the data length".into(),
                ));
            }
            Some(s.as_slice())
        }
    };
    let names: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
    let residuals = |p: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * n_points);
        match problem.model.with_values(&names, p) {
            Ok(m) => observation_residuals(&m, &problem.data, weights, problem.scale, &mut out),
            Err(_) => out.resize(2 * n_points, f64::NAN),
        }
        out
    };
    minimize(&residuals, &specs, &problem.options)
}

/// Known-resonance spectrum entering a joint geometry fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryDataset {
    pub f_res: f64,
    pub data: FitData,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryProblem {
    pub datasets: Vec<GeometryDataset>,
    /// Values of the shared parameters that stay fixed; `f_res` is ignored.
    pub base: SingleGseParams,
    pub mode: PhaseMode,
    /// Free subset of `kappa`, `beta`, `length`, `speed`.
    pub free: Vec<ParamSpec>,
    pub scale: MagnitudeScale,
    pub options: FitOptions,
}

/// Jointly fits shared coupling, loss and geometry across spectra taken at
/// several resonance frequencies.
pub fn fit_global_geometry(problem: &GeometryProblem) -> Result<FitResult> {
    if problem.datasets.len() < 3 {
        return Err(GseError::InvalidInput(format!(
            "a geometry fit needs at least 3 datasets, got {}",
            problem.datasets.len()
        )));
    }
    let template = FitModel::Single { base: problem.base.clone(), mode: problem.mode };
    let specs = checked_specs(&template, &problem.free)?;
    if let Some(s) = specs.iter().find(|s| s.name == "f_res") {
        return Err(GseError::InvalidInput(format!("`{}` is per dataset, not shared", s.name)));
    }
    let names: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
    let initial = template.with_values(&names, &specs.iter().map(|s| s.initial).collect::<Vec<_>>())?;
    let period = match &initial {
        FitModel::Single { base, .. } => base.period(),
        _ => unreachable!(),
    };
    let (lo, hi) = problem
        .datasets
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d.f_res), hi.max(d.f_res)));
    if hi - lo == 0.0 {
        return Err(GseError::Degenerate(
            "all datasets share one resonance frequency; the propagation phase cannot be separated".into(),
        ));
    }
    if hi - lo < period {
        return Err(GseError::Degenerate(format!(
            "datasets span {:.6e} Hz, less than one interference period ({period:.6e} Hz)",
            hi - lo
        )));
    }
    let models_at = |p: &[f64]| -> Option<Vec<FitModel>> {
        let m = template.with_values(&names, p).ok()?;
        let FitModel::Single { base, mode } = m else { unreachable!() };
        Some(
            problem
                .datasets
                .iter()
                .map(|d| FitModel::Single { base: base.with_f_res(d.f_res), mode })
                .collect(),
        )
    };
    let total: usize = problem.datasets.iter().map(|d| 2 * d.data.len()).sum();
    let residuals = |p: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(total);
        match models_at(p) {
            Some(models) => {
                for (m, d) in models.iter().zip(&problem.datasets) {
                    observation_residuals(m, &d.data, None, problem.scale, &mut out);
                }
            }
            None => out.resize(total, f64::NAN),
        }
        out
    };
    let mut result = minimize(&residuals, &specs, &problem.options)?;
    let models = models_at(&result.values).expect("fitted values are valid");
    result.dataset_residuals = models
        .iter()
        .zip(&problem.datasets)
        .map(|(m, d)| {
            let mut r = Vec::new();
            observation_residuals(m, &d.data, None, problem.scale, &mut r);
            r.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .collect();
    Ok(result)
}

struct Scaled<'a, F> {
    residuals: &'a F,
    scales: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl<F: Fn(&[f64]) -> Vec<f64>> Scaled<'_, F> {
    fn physical(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.scales).map(|(v, s)| v * s).collect()
    }

    fn eval(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_vec((self.residuals)(&self.physical(x)))
    }

    fn clamp(&self, x: &mut [f64]) {
        for (j, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[j], self.upper[j]);
        }
    }

    fn cost(r: &DVector<f64>) -> f64 {
        let c = 0.5 * r.norm_squared();
        if c.is_finite() { c } else { f64::INFINITY }
    }

    /// Forward differences, stepping backward when the forward point leaves
    /// the box.
    fn jacobian(&self, x: &[f64], r: &DVector<f64>) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(r.len(), x.len());
        let mut probe = x.to_vec();
        for j in 0..x.len() {
            let mut h = JACOBIAN_STEP * x[j].abs().max(1.0);
            if x[j] + h > self.upper[j] {
                h = -h;
            }
            probe[j] = x[j] + h;
            let rp = self.eval(&probe);
            probe[j] = x[j];
            jac.set_column(j, &((rp - r) / h));
        }
        jac
    }

    fn central_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.eval(x).len();
        let mut jac = DMatrix::zeros(m, x.len());
        let mut probe = x.to_vec();
        for j in 0..x.len() {
            let h = 1e-4 * x[j].abs().max(1.0);
            probe[j] = x[j] + h;
            let rp = self.eval(&probe);
            probe[j] = x[j] - h;
            let rm = self.eval(&probe);
            probe[j] = x[j];
            jac.set_column(j, &((rp - rm) / (2.0 * h)));
        }
        jac
    }
}

/// Names of parameters involved in a vanishing or near-vanishing direction of
/// the normal matrix, if any.
fn unidentifiable(jac: &DMatrix<f64>, names: &[String]) -> Option<Vec<String>> {
    let norms: Vec<f64> = jac.column_iter().map(|c| c.norm()).collect();
    let zero: Vec<String> = names
        .iter()
        .zip(&norms)
        .filter(|(_, &n)| !(n > 0.0) || !n.is_finite())
        .map(|(s, _)| s.clone())
        .collect();
    if !zero.is_empty() {
        return Some(zero);
    }
    let mut unit = jac.clone();
    for (j, n) in norms.iter().enumerate() {
        unit.column_mut(j).unscale_mut(*n);
    }
    let eig = SymmetricEigen::new(unit.transpose() * &unit);
    let (k, &smallest) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    if smallest >= IDENTIFIABILITY_FLOOR {
        return None;
    }
    let v = eig.eigenvectors.column(k);
    Some(
        names
            .iter()
            .zip(v.iter())
            .filter(|(_, c)| c.abs() > 0.1)
            .map(|(s, _)| s.clone())
            .collect(),
    )
}

fn gradient_cosine(jac: &DMatrix<f64>, r: &DVector<f64>) -> f64 {
    let rn = r.norm();
    if rn == 0.0 {
        return 0.0;
    }
    jac.column_iter()
        .map(|c| {
            let cn = c.norm();
            if cn == 0.0 { 0.0 } else { (c.dot(r) / (cn * rn)).abs() }
        })
        .fold(0.0, f64::max)
}

fn minimize<F: Fn(&[f64]) -> Vec<f64>>(residuals: &F, specs: &[ParamSpec], options: &FitOptions) -> Result<FitResult> {
    let scales: Vec<f64> = specs.iter().map(ParamSpec::scale).collect();
    let problem = Scaled {
        residuals,
        lower: specs.iter().zip(&scales).map(|(s, k)| s.lower / k).collect(),
        upper: specs.iter().zip(&scales).map(|(s, k)| s.upper / k).collect(),
        scales,
    };
    let names: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
    let n = specs.len();
    let mut x: Vec<f64> = specs.iter().map(|s| s.initial / s.scale()).collect();
    let mut r = problem.eval(&x);
    if r.len() <= n {
        return Err(GseError::InvalidInput("fewer residuals than free parameters".into()));
    }
    let mut cost = Scaled::<F>::cost(&r);
    if !cost.is_finite() {
        return Err(GseError::InvalidInput("model is not finite at the initial guess".into()));
    }
    if let Some(bad) = unidentifiable(&problem.central_jacobian(&x), &names) {
        return Err(GseError::Unidentifiable { names: bad });
    }

    let mut lambda = 1e-3;
    let mut converged = false;
    let mut method = FitMethod::LevenbergMarquardt;
    let mut iterations = 0;
    'outer: while iterations < options.max_iterations {
        iterations += 1;
        let mut jac = problem.jacobian(&x, &r);
        let gradient = jac.transpose() * &r;
        // Parameters pinned at a bound by a gradient pointing out of the box
        // are frozen for this iteration.
        let pinned: Vec<bool> = (0..n)
            .map(|j| {
                (x[j] <= problem.lower[j] && gradient[j] > 0.0)
                    || (x[j] >= problem.upper[j] && gradient[j] < 0.0)
            })
            .collect();
        for (j, &p) in pinned.iter().enumerate() {
            if p {
                jac.column_mut(j).fill(0.0);
            }
        }
        if cost == 0.0 || gradient_cosine(&jac, &r) <= options.gradient_tolerance {
            converged = true;
            break;
        }
        let normal = jac.transpose() * &jac;
        let gradient = jac.transpose() * &r;
        loop {
            let mut damped = normal.clone();
            for j in 0..n {
                damped[(j, j)] += if pinned[j] { 1.0 } else { lambda * normal[(j, j)].max(1e-300) };
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                if lambda > 1e16 {
                    debug!("normal matrix singular, switching to simplex search");
                    method = FitMethod::NelderMead;
                    let (xs, it, ok) = nelder_mead(&problem, &x, options);
                    iterations += it;
                    x = xs;
                    r = problem.eval(&x);
                    cost = Scaled::<F>::cost(&r);
                    converged = ok;
                    break 'outer;
                }
                continue;
            };
            let step = chol.solve(&(-&gradient));
            let mut trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            problem.clamp(&mut trial);
            let r_trial = problem.eval(&trial);
            let c_trial = Scaled::<F>::cost(&r_trial);
            if c_trial < cost {
                let decrease = (cost - c_trial) / cost;
                let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let moved = x.iter().zip(&trial).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                x = trial;
                r = r_trial;
                cost = c_trial;
                lambda = (lambda / 3.0).max(1e-12);
                if decrease < options.cost_tolerance
                    || moved <= options.step_tolerance * (x_norm + options.step_tolerance)
                {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            lambda *= 4.0;
            if lambda > 1e16 {
                // No downhill step exists at working precision.
                converged = gradient_cosine(&jac, &r) <= 1e-6;
                break 'outer;
            }
        }
    }
    if !converged && iterations >= options.max_iterations {
        return Err(GseError::NotConverged { iterations, cost });
    }

    let jac = problem.jacobian(&x, &r);
    let m = r.len();
    let variance = 2.0 * cost / (m - n) as f64;
    let covariance = (jac.transpose() * &jac).try_inverse().ok_or_else(|| GseError::Unidentifiable {
        names: unidentifiable(&jac, &names).unwrap_or_else(|| names.clone()),
    })?;
    let values = problem.physical(&x);
    let sigmas = (0..n)
        .map(|j| problem.scales[j] * (variance * covariance[(j, j)]).max(0.0).sqrt())
        .collect();
    if !converged {
        warn!("fit stopped without meeting its tolerances");
    }
    Ok(FitResult {
        names,
        values,
        sigmas,
        residual_norm: (2.0 * cost).sqrt(),
        n_iter: iterations,
        converged,
        method,
        dataset_residuals: Vec::new(),
    })
}

/// Bounded simplex search in scaled coordinates.
fn nelder_mead<F: Fn(&[f64]) -> Vec<f64>>(problem: &Scaled<'_, F>, start: &[f64], options: &FitOptions) -> (Vec<f64>, usize, bool) {
    let n = start.len();
    let f = |x: &[f64]| Scaled::<F>::cost(&problem.eval(x));
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for j in 0..n {
        let mut v = start.to_vec();
        v[j] += 0.05 * v[j].abs().max(1.0);
        problem.clamp(&mut v);
        simplex.push(v);
    }
    let mut costs: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let limit = 2000 * n.max(1);
    for it in 1..=limit {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]));
        simplex = order.iter().map(|&k| simplex[k].clone()).collect();
        costs = order.iter().map(|&k| costs[k]).collect();
        let spread = costs[n] - costs[0];
        if spread <= options.cost_tolerance * costs[0].abs() || costs[n] == 0.0 {
            return (simplex.swap_remove(0), it, true);
        }
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| {
            let mut v: Vec<f64> = centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect();
            problem.clamp(&mut v);
            v
        };
        let reflected = along(1.0);
        let fr = f(&reflected);
        if fr < costs[0] {
            let expanded = along(2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                costs[n] = fe;
            } else {
                simplex[n] = reflected;
                costs[n] = fr;
            }
        } else if fr < costs[n - 1] {
            simplex[n] = reflected;
            costs[n] = fr;
        } else {
            let contracted = along(if fr < costs[n] { 0.5 } else { -0.5 });
            let fc = f(&contracted);
            if fc < costs[n].min(fr) {
                simplex[n] = contracted;
                costs[n] = fc;
            } else {
                for k in 1..=n {
                    let v: Vec<f64> = simplex[0].iter().zip(&simplex[k]).map(|(b, w)| b + 0.5 * (w - b)).collect();
                    costs[k] = f(&v);
                    simplex[k] = v;
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| costs[a].total_cmp(&costs[b])).unwrap_or(0);
    (simplex.swap_remove(best), limit, false)
}

/// Starting values read off a single dip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleGuess {
    pub f_res: f64,
    pub kappa: f64,
    pub beta: f64,
    pub kappa_g: f64,
    pub f_dip: f64,
}

/// Heuristic start for a single-ensemble fit. The dip depth splits the total
/// linewidth into radiative and loss parts, and the known geometry converts
/// the radiative part into `kappa` and the dip position into `f_res`.
pub fn initial_guess_single(data: &FitData, length: f64, speed: f64) -> Result<SingleGuess> {
    let mags = data.magnitudes();
    let (idx, &floor) = mags
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| GseError::InvalidInput("empty data".into()))?;
    let power: Vec<f64> = mags.iter().map(|m| m * m).collect();
    // For a Lorentzian dip in |S21|², half depth sits one total linewidth
    // from the centre.
    let full = half_depth_width(&data.frequencies, &power, idx, 1.0).ok_or_else(|| {
        GseError::Degenerate("dip does not recover to half depth inside the data".into())
    })?;
    let total = 0.5 * full;
    let floor = floor.min(1.0);
    let kappa_g = total * (1.0 - floor);
    let beta = total * floor;
    let f_dip = data.frequencies[idx];
    let phi = 2.0 * std::f64::consts::PI * f_dip * length / speed;
    let kappa = kappa_g / (2.0 * (1.0 + phi.cos())).max(1e-2);
    Ok(SingleGuess { f_res: f_dip - kappa * phi.sin(), kappa, beta, kappa_g, f_dip })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub f_res: f64,
    pub kappa_g: f64,
    pub sigma: f64,
    /// Interference prediction `2κ(1 + cos φ)` from the reference geometry.
    pub predicted: f64,
}

/// Collects fitted radiative rates over a resonance sweep next to the
/// interference prediction. Each fit must carry a `kappa_g` value.
pub fn extract_decay_curve(fits: &[(f64, FitResult)], reference: &SingleGseParams) -> Result<Vec<DecayPoint>> {
    if fits.is_empty() {
        return Err(GseError::InvalidInput("no fits to tabulate".into()));
    }
    let mut rows = Vec::with_capacity(fits.len());
    for (f_res, result) in fits {
        let kappa_g = result
            .value("kappa_g")
            .ok_or_else(|| GseError::InvalidInput("fit result has no `kappa_g` parameter".into()))?;
        rows.push(DecayPoint {
            f_res: *f_res,
            kappa_g,
            sigma: result.sigma("kappa_g").unwrap_or(0.0),
            predicted: decay_from_phase(reference.kappa, reference.phase_at(*f_res)),
        });
    }
    rows.sort_by(|a, b| a.f_res.total_cmp(&b.f_res));
    Ok(rows)
}

/// Mean spacing of the interior maxima of a decay curve.
pub fn decay_curve_period(points: &[DecayPoint]) -> Option<f64> {
    let x: Vec<f64> = points.iter().map(|p| p.f_res).collect();
    let y: Vec<f64> = points.iter().map(|p| p.kappa_g).collect();
    let peaks: Vec<f64> = (1..y.len().saturating_sub(1))
        .filter(|&k| y[k] > y[k - 1] && y[k] >= y[k + 1])
        .map(|k| refine_extremum(&x, &y, k))
        .collect();
    if peaks.len() < 2 {
        return None;
    }
    Some((peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64)
}
