use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use gse_core::anisotropy::{angle_sweep, AnisotropyParams};
use gse_core::fitting::{
    fit, fit_global_geometry, initial_guess_single, FitMethod, FitModel, FitOptions, FitProblem,
    FitReport, FitResult, GeometryDataset, GeometryProblem, LorentzianParams, ParamSpec, SingleGuess,
};
use gse_core::lamb_pv::{pv_closed, pv_quadrature};
use gse_core::multipoint::{build_effective, s_matrix};
use gse_core::nested::{
    eigen_traces, map_nested_vs_detuning, s21_nested_fitform, s21_nested_matrix, FitFormParams, NestedModel,
    NestedParams,
};
use gse_core::single::{map_single_vs_field, s21_single, MapColumn, TransmissionMap};
use gse_core::synth::add_complex_noise;
use gse_core::{field_to_frequency, presets, FrequencyGrid, PhaseMode, SingleGseParams, Spectrum, Waveguide};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;
use crate::config::load_topology;
use crate::error::{CliError, Result};
use crate::output::OutputDir;
use crate::table;
use crate::units::{self, Sweep};

/// Runs one command and returns the manifest path. Nothing is left in the
/// output directory if the command fails.
pub fn run(cli: &Cli) -> Result<PathBuf> {
    // A second call in the same process keeps the first pool; that is fine.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();

    let mut out = OutputDir::create(&cli.out)?;
    let name = match &cli.command {
        Command::SimulateSingle(a) => {
            let s = spectrum_for(&SynthSource::Single(a.clone()), &mut out)?;
            out.write("spectrum.csv", &table::spectrum_csv(&s))?;
            "simulate-single"
        }
        Command::SimulateNested(a) => {
            let s = spectrum_for(&SynthSource::Nested(a.clone()), &mut out)?;
            out.write("spectrum.csv", &table::spectrum_csv(&s))?;
            "simulate-nested"
        }
        Command::SimulateGeneral(a) => {
            let s = spectrum_for(&SynthSource::General(a.clone()), &mut out)?;
            out.write("spectrum.csv", &table::spectrum_csv(&s))?;
            "simulate-general"
        }
        Command::Synth(a) => {
            if !(a.sigma >= 0.0) {
                return Err(CliError::Usage(format!("--sigma must be non-negative, got {}", a.sigma)));
            }
            let s = spectrum_for(&a.source, &mut out)?;
            let noisy = add_complex_noise(&s, a.sigma, cli.seed)?;
            out.write("spectrum.csv", &table::spectrum_csv(&noisy))?;
            "synth"
        }
        Command::Map(a) => {
            map(a, &mut out)?;
            "map"
        }
        Command::Fit(a) => {
            fit_one(a, &mut out)?;
            "fit"
        }
        Command::FitGeometry(a) => {
            fit_geometry(a, &mut out)?;
            "fit-geometry"
        }
        Command::Anisotropy(a) => {
            let p = anisotropy_params(&a.model)?;
            let thetas = sweep(&a.angles, units::angle)?.values();
            let f = angle_sweep(&p, &thetas, a.model.law.into())?;
            out.write("angle.csv", &table::angle_csv(&thetas, &f))?;
            "anisotropy"
        }
        Command::PvCheck(a) => {
            pv_check(a, &mut out)?;
            "pv-check"
        }
    };
    out.finish(name, cli.seed)
}

fn sweep(text: &str, unit: fn(&str) -> std::result::Result<f64, String>) -> Result<Sweep> {
    Sweep::parse(text, unit).map_err(CliError::Usage)
}

fn single_params(m: &SingleModelArgs, f_res: f64) -> Result<SingleGseParams> {
    Ok(SingleGseParams::new(m.kappa, m.beta, m.length, f_res, Waveguide::new(m.speed)?)?)
}

fn grid_around(p: &ProbeArgs, center: f64) -> Result<FrequencyGrid> {
    Ok(match (p.start, p.stop) {
        (Some(a), Some(b)) => FrequencyGrid::new(a, b, p.points)?,
        _ => FrequencyGrid::centered(center, p.span, p.points)?,
    })
}

/// Grid covering every column resonance plus the probe span on either side.
fn grid_covering(p: &ProbeArgs, resonances: &[f64]) -> Result<FrequencyGrid> {
    let lo = resonances.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = resonances.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    match (p.start, p.stop) {
        (Some(a), Some(b)) => Ok(FrequencyGrid::new(a, b, p.points)?),
        _ => Ok(FrequencyGrid::new(lo - p.span, hi + p.span, p.points)?),
    }
}

fn fit_form(m: &NestedModelArgs, out: &mut OutputDir) -> Result<FitFormParams> {
    let mut p = match &m.params {
        Some(path) => {
            out.note_input(path)?;
            read_fit_form(path)?
        }
        None => match m.preset {
            Preset::Coherent => presets::coherent_point(),
            Preset::Dissipative => presets::dissipative_point(),
        },
    };
    if let Some(f) = m.f_i {
        p.f_i = f;
    }
    p.f_o = m.f_o.unwrap_or(if m.f_i.is_some() { p.f_i } else { p.f_o });
    p.validate()?;
    Ok(p)
}

fn read_fit_form(path: &Path) -> Result<FitFormParams> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        pointer: "/".into(),
        message: e.to_string(),
    })
}

/// Reference-sample geometry and rates with the given resonances.
fn nested_matrix(f_i: f64, f_o: f64) -> Result<NestedParams> {
    let wg = Waveguide::new(presets::SPEED)?;
    let inner = SingleGseParams::new(presets::KAPPA_I, presets::BETA_I, presets::L_I, f_i, wg)?;
    let outer = SingleGseParams::new(presets::KAPPA_O, presets::BETA_O, presets::L_O, f_o, wg)?;
    Ok(NestedParams::symmetric(inner, outer)?)
}

fn note_singular(s: &Spectrum) {
    if !s.singular.is_empty() {
        warn!(
            "{} probe point(s) hit a zero-linewidth resonance and were set to unit transmission",
            s.singular.len()
        );
    }
}

fn spectrum_for(source: &SynthSource, out: &mut OutputDir) -> Result<Spectrum> {
    let s = match source {
        SynthSource::Single(a) => {
            let p = single_params(&a.model, a.f_res)?;
            s21_single(&p, &grid_around(&a.probe, a.f_res)?, a.mode.phase_mode.into())?
        }
        SynthSource::Nested(a) => {
            let p = fit_form(&a.model, out)?;
            let grid = grid_around(&a.probe, p.f_i)?;
            match a.model.form {
                NestedForm::Fit => s21_nested_fitform(&p, &grid)?,
                NestedForm::Matrix => s21_nested_matrix(&nested_matrix(p.f_i, p.f_o)?, &grid, a.mode.phase_mode.into())?,
            }
        }
        SynthSource::General(a) => {
            out.note_input(&a.config)?;
            let c = load_topology(&a.config, &a.overrides)?;
            let m = build_effective(&c.topology, &c.waveguide)?;
            s_matrix(&m, &c.grid, a.mode.phase_mode.into())?.transmission
        }
    };
    note_singular(&s);
    Ok(s)
}

fn anisotropy_params(a: &AnisotropyModelArgs) -> Result<AnisotropyParams> {
    let ha = match a.tuning_span {
        Some(span) => AnisotropyParams::anisotropy_for_span(span, gse_core::model::GYROMAGNETIC_HZ_PER_T),
        None => a.anisotropy_field,
    };
    Ok(AnisotropyParams::new(a.bias, ha)?)
}

fn map(a: &MapArgs, out: &mut OutputDir) -> Result<()> {
    let mode: PhaseMode = a.mode.phase_mode.into();
    match a.sweep {
        SweepKind::Field => {
            let fields = sweep(&a.values, units::field)?.values();
            let ha = match a.anisotropy.tuning_span {
                Some(_) => anisotropy_params(&a.anisotropy)?.anisotropy,
                None => a.anisotropy.anisotropy_field,
            };
            let resonances = fields
                .iter()
                .map(|&b| field_to_frequency(b, ha))
                .collect::<gse_core::Result<Vec<_>>>()?;
            let p = single_params(&a.single, resonances[0])?;
            let grid = grid_covering(&a.probe, &resonances)?;
            let m = map_single_vs_field(&p, &fields, ha, &grid, mode)?;
            out.write("map.csv", &table::map_csv(&m))?;
        }
        SweepKind::Detuning => {
            let detunings = sweep(&a.values, units::frequency)?.values();
            let p = fit_form(&a.nested, out)?;
            let f_o: Vec<f64> = detunings.iter().map(|d| p.f_i + d).collect();
            let grid = grid_around(&a.probe, p.f_i)?;
            let model = match a.nested.form {
                NestedForm::Fit => NestedModel::FitForm(p),
                NestedForm::Matrix => NestedModel::Matrix(nested_matrix(p.f_i, p.f_i)?, mode),
            };
            let mut m = map_nested_vs_detuning(&model, &f_o, &grid)?;
            for (c, &d) in m.columns.iter_mut().zip(&detunings) {
                c.sweep_value = d;
            }
            out.write("map.csv", &table::map_csv(&m))?;
            match a.nested.form {
                NestedForm::Fit => {
                    let traces = eigen_traces(&p, &f_o)?;
                    if !traces.exceptional.is_empty() {
                        info!("{} exceptional point(s) along the sweep", traces.exceptional.len());
                    }
                    out.write("eigen_traces.csv", &table::traces_csv(&traces, &detunings))?;
                }
                NestedForm::Matrix => info!("eigenvalue traces are only written for the fit form"),
            }
        }
        SweepKind::Angle => {
            let thetas = sweep(&a.values, units::angle)?.values();
            let ap = anisotropy_params(&a.anisotropy)?;
            let resonances = angle_sweep(&ap, &thetas, a.anisotropy.law.into())?;
            let p = single_params(&a.single, resonances[0])?;
            let grid = grid_covering(&a.probe, &resonances)?;
            let columns = thetas
                .par_iter()
                .zip(&resonances)
                .map(|(&theta, &f)| {
                    Ok(MapColumn {
                        sweep_value: theta,
                        spectrum: s21_single(&p.with_f_res(f), &grid, mode)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            out.write("map.csv", &table::map_csv(&TransmissionMap { columns }))?;
            out.write("angle.csv", &table::angle_csv(&thetas, &resonances))?;
        }
    }
    Ok(())
}

fn pv_check(a: &PvArgs, out: &mut OutputDir) -> Result<()> {
    let xs = sweep(&a.x, units::plain)?.values();
    let branch = a.branch.into();
    let rows = xs
        .par_iter()
        .map(|&x| Ok((pv_closed(x, branch)?, pv_quadrature(x, branch)?)))
        .collect::<Result<Vec<_>>>()?;
    let worst = rows
        .iter()
        .map(|(c, q)| (c.a - q.a).abs().max((c.b - q.b).abs()))
        .fold(0.0, f64::max);
    info!("largest closed-form vs quadrature difference {worst:e}");
    out.write("pv_check.csv", &table::pv_csv(&rows))
}

/// A `--free` entry: `name`, `name=start` or `name=start:lower:upper`, where
/// empty bounds mean unbounded.
#[derive(Debug, Clone, PartialEq)]
struct FreeSpec {
    name: String,
    start: Option<f64>,
    lower: f64,
    upper: f64,
}

fn parse_free(text: &str) -> Result<FreeSpec> {
    let (name, rest) = match text.split_once('=') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (text.trim(), None),
    };
    let unit = units::for_parameter(name);
    let bad = |m: String| CliError::Usage(format!("--free {text}: {m}"));
    let mut spec = FreeSpec {
        name: name.to_string(),
        start: None,
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };
    if let Some(rest) = rest {
        let parts: Vec<&str> = rest.split(':').collect();
        match parts[..] {
            [s] => spec.start = Some(unit(s).map_err(bad)?),
            [s, lo, hi] => {
                spec.start = Some(unit(s).map_err(bad)?);
                if !lo.trim().is_empty() {
                    spec.lower = unit(lo).map_err(bad)?;
                }
                if !hi.trim().is_empty() {
                    spec.upper = unit(hi).map_err(bad)?;
                }
            }
            _ => return Err(bad("expected name=start or name=start:lower:upper".into())),
        }
    }
    Ok(spec)
}

fn param_specs(free: &[String], model: &FitModel, default_start: impl Fn(&str) -> Option<f64>) -> Result<Vec<ParamSpec>> {
    free.iter()
        .map(|text| {
            let f = parse_free(text)?;
            let current = model.value(&f.name).ok_or_else(|| {
                CliError::Usage(format!(
                    "`{}` is not a parameter of this model (expected one of {})",
                    f.name,
                    model.parameter_names().join(", ")
                ))
            })?;
            let start = f.start.or_else(|| default_start(&f.name)).unwrap_or(current);
            Ok(ParamSpec::bounded(&f.name, start, f.lower, f.upper))
        })
        .collect()
}

#[derive(Serialize)]
struct FitOutput {
    model: &'static str,
    #[serde(flatten)]
    report: FitReport,
    method: FitMethod,
    /// Every model parameter at the solution, free and fixed.
    model_params: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    dataset_residuals: Vec<f64>,
}

fn fit_output(model_name: &'static str, model: &FitModel, r: &FitResult) -> Result<Vec<u8>> {
    if !r.converged {
        warn!("fit stopped after {} iterations without meeting the convergence tests", r.n_iter);
    }
    let solved = model.with_values(&r.names, &r.values)?;
    let model_params = solved
        .parameter_names()
        .iter()
        .map(|n| (n.to_string(), solved.value(n).expect("listed parameter")))
        .collect();
    let output = FitOutput {
        model: model_name,
        report: r.report(),
        method: r.method,
        model_params,
        dataset_residuals: r.dataset_residuals.clone(),
    };
    let mut json = serde_json::to_vec_pretty(&output).expect("report serializes");
    json.push(b'\n');
    Ok(json)
}

fn fit_one(a: &FitArgs, out: &mut OutputDir) -> Result<()> {
    out.note_input(&a.data)?;
    let data = table::ingest_spectrum(&a.data)?;
    let guess = || -> Result<SingleGuess> { Ok(initial_guess_single(&data, a.single.length, a.single.speed)?) };
    let (name, model, free) = match a.model {
        FitModelArg::Single => {
            let g = guess().ok();
            let f_res = match (a.f_res, g) {
                (Some(f), _) => f,
                (None, Some(g)) => g.f_res,
                (None, None) => return Err(CliError::Usage("no --f-res given and no dip found to estimate it".into())),
            };
            let model = FitModel::Single {
                base: single_params(&a.single, f_res)?,
                mode: a.mode.phase_mode.into(),
            };
            let free = param_specs(&a.free, &model, |n| match (n, g) {
                ("kappa", Some(g)) => Some(g.kappa),
                ("beta", Some(g)) => Some(g.beta),
                _ => None,
            })?;
            ("single", model, free)
        }
        FitModelArg::Lorentzian => {
            let g = guess()?;
            let model = FitModel::Lorentzian(LorentzianParams {
                f_center: g.f_dip,
                kappa_g: g.kappa_g,
                beta: g.beta,
            });
            let free = param_specs(&a.free, &model, |_| None)?;
            ("lorentzian", model, free)
        }
        FitModelArg::Nested => {
            let model = FitModel::Nested(fit_form(&a.nested, out)?);
            let free = param_specs(&a.free, &model, |_| None)?;
            ("nested", model, free)
        }
    };
    let mut problem = FitProblem::new(data, model.clone(), free);
    problem.scale = a.scale.into();
    problem.options = FitOptions {
        max_iterations: a.max_iterations,
        ..FitOptions::default()
    };
    let r = fit(&problem)?;
    out.write("fit_report.json", &fit_output(name, &model, &r)?)
}

fn fit_geometry(a: &GeometryArgs, out: &mut OutputDir) -> Result<()> {
    let mut datasets = Vec::with_capacity(a.datasets.len());
    for entry in &a.datasets {
        let (f, path) = entry
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--dataset {entry}: expected f_res=path")))?;
        let f_res = units::frequency(f).map_err(|m| CliError::Usage(format!("--dataset {entry}: {m}")))?;
        let path = Path::new(path);
        out.note_input(path)?;
        datasets.push(GeometryDataset {
            f_res,
            data: table::ingest_spectrum(path)?,
        });
    }
    let base = single_params(&a.single, datasets[0].f_res)?;
    let mode: PhaseMode = a.mode.phase_mode.into();
    let model = FitModel::Single { base, mode };
    let free = param_specs(&a.free, &model, |_| None)?;
    let problem = GeometryProblem {
        datasets,
        base,
        mode,
        free,
        scale: a.scale.into(),
        options: FitOptions {
            max_iterations: a.max_iterations,
            ..FitOptions::default()
        },
    };
    let r = fit_global_geometry(&problem)?;
    out.write("fit_report.json", &fit_output("single", &model, &r)?)
}
