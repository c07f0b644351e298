use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Override;
use crate::units;

#[derive(Debug, Parser)]
#[command(
    name = "gse",
    version,
    about = "Transmission spectra, couplings and fits for giant spin ensembles on a meandering waveguide"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output directory, created if missing.
    #[arg(long, short, global = true, default_value = "gse_out")]
    pub out: PathBuf,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "GSE_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Seed for synthetic noise.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One two-point ensemble.
    SimulateSingle(SingleArgs),
    /// Two nested ensembles.
    SimulateNested(NestedArgs),
    /// Any topology, from a JSON configuration.
    SimulateGeneral(GeneralArgs),
    /// Transmission map against field, outer-mode detuning or field angle.
    Map(MapArgs),
    /// Least-squares fit of one measured spectrum.
    Fit(FitArgs),
    /// Joint fit of spectra at several resonances, sharing geometry.
    FitGeometry(GeometryArgs),
    /// Resonance frequency against field angle.
    Anisotropy(AnisotropyArgs),
    /// Closed-form principal-value integrals against quadrature.
    PvCheck(PvArgs),
    /// A simulated spectrum plus complex Gaussian noise.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseModeArg {
    /// Phase taken at the emitter resonance.
    Resonance,
    /// Phase taken at each probe frequency.
    Probe,
}

impl From<PhaseModeArg> for gse_core::PhaseMode {
    fn from(m: PhaseModeArg) -> Self {
        match m {
            PhaseModeArg::Resonance => gse_core::PhaseMode::Resonance,
            PhaseModeArg::Probe => gse_core::PhaseMode::Probe,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModeArgs {
    /// Where the propagation phase is evaluated.
    #[arg(long, value_enum, default_value_t = PhaseModeArg::Resonance)]
    pub phase_mode: PhaseModeArg,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    /// First probe frequency; needs --stop.
    #[arg(long, value_parser = units::frequency, requires = "stop")]
    pub start: Option<f64>,
    /// Last probe frequency; needs --start.
    #[arg(long, value_parser = units::frequency, requires = "start")]
    pub stop: Option<f64>,
    /// Half-width of the probe window around the model's centre frequency.
    #[arg(long, value_parser = units::frequency, default_value = "20MHz")]
    pub span: f64,
    /// Number of probe frequencies.
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
}

/// Reference-sample inner-ensemble values unless overridden.
#[derive(Debug, Clone, Args)]
pub struct SingleModelArgs {
    /// Radiative rate per coupling point.
    #[arg(long, value_parser = units::frequency, default_value = "0.76MHz")]
    pub kappa: f64,
    /// Intrinsic loss rate.
    #[arg(long, value_parser = units::frequency, default_value = "1.58MHz")]
    pub beta: f64,
    /// Distance between the two coupling points.
    #[arg(long, value_parser = units::length, default_value = "8.28cm")]
    pub length: f64,
    /// Phase velocity of the waveguide.
    #[arg(long, value_parser = units::speed, default_value = "3.26e7m/s")]
    pub speed: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SingleArgs {
    /// Ensemble resonance frequency.
    #[arg(long, value_parser = units::frequency)]
    pub f_res: f64,
    #[command(flatten)]
    pub model: SingleModelArgs,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[command(flatten)]
    pub probe: ProbeArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NestedForm {
    /// Eight-parameter two-mode transmission.
    Fit,
    /// Two-port scattering from the reference-sample geometry and rates.
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Fitted coherent point, 4.35 GHz.
    Coherent,
    /// Fitted dissipative point, 4.96 GHz.
    Dissipative,
}

#[derive(Debug, Clone, Args)]
pub struct NestedModelArgs {
    #[arg(long, value_enum, default_value_t = NestedForm::Fit)]
    pub form: NestedForm,
    /// Starting parameter set for the fit form.
    #[arg(long, value_enum, default_value_t = Preset::Coherent)]
    pub preset: Preset,
    /// JSON file with all eight fit-form parameters in Hz; replaces --preset.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Inner resonance; defaults to the preset's.
    #[arg(long, value_parser = units::frequency)]
    pub f_i: Option<f64>,
    /// Outer resonance; defaults to the inner one.
    #[arg(long, value_parser = units::frequency)]
    pub f_o: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct NestedArgs {
    #[command(flatten)]
    pub model: NestedModelArgs,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[command(flatten)]
    pub probe: ProbeArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GeneralArgs {
    /// Topology configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Override a configuration value, e.g. `probe.n_points=4001`.
    #[arg(long = "set", value_parser = Override::parse)]
    pub overrides: Vec<Override>,
    #[command(flatten)]
    pub mode: ModeArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// Bias field; values in T or mT.
    Field,
    /// Outer minus inner resonance; values in Hz units.
    Detuning,
    /// In-plane field angle; values in deg or rad.
    Angle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawArg {
    Full,
    Simple,
}

impl From<LawArg> for gse_core::anisotropy::AngleLaw {
    fn from(l: LawArg) -> Self {
        match l {
            LawArg::Full => Self::Full,
            LawArg::Simple => Self::Simple,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnisotropyModelArgs {
    /// Bias field.
    #[arg(long, value_parser = units::field, default_value = "155mT")]
    pub bias: f64,
    /// First-order anisotropy field.
    #[arg(long, value_parser = units::field, default_value = "0T")]
    pub anisotropy_field: f64,
    /// Peak-to-peak angular tuning range; sets the anisotropy field instead.
    #[arg(long, value_parser = units::frequency, conflicts_with = "anisotropy_field")]
    pub tuning_span: Option<f64>,
    #[arg(long, value_enum, default_value_t = LawArg::Full)]
    pub law: LawArg,
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    #[arg(long, value_enum)]
    pub sweep: SweepKind,
    /// Sweep as start:stop:count with units matching --sweep.
    #[arg(long)]
    pub values: String,
    #[command(flatten)]
    pub single: SingleModelArgs,
    #[command(flatten)]
    pub nested: NestedModelArgs,
    #[command(flatten)]
    pub anisotropy: AnisotropyModelArgs,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[command(flatten)]
    pub probe: ProbeArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModelArg {
    /// Two-point ensemble with explicit geometry.
    Single,
    /// Dressed Lorentzian dip: centre, radiative width, loss.
    Lorentzian,
    /// Eight-parameter two-mode transmission.
    Nested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    Linear,
    Db,
}

impl From<ScaleArg> for gse_core::fitting::MagnitudeScale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Linear => Self::Linear,
            ScaleArg::Db => Self::Db,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Spectrum CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub model: FitModelArg,
    /// Free parameter: `name`, `name=start` or `name=start:lower:upper`.
    /// Without a start value one is estimated from the data.
    #[arg(long, required = true)]
    pub free: Vec<String>,
    /// Resonance for the single model; estimated from the data if omitted.
    #[arg(long, value_parser = units::frequency)]
    pub f_res: Option<f64>,
    #[command(flatten)]
    pub single: SingleModelArgs,
    #[command(flatten)]
    pub nested: NestedModelArgs,
    #[command(flatten)]
    pub mode: ModeArgs,
    /// Residual scale for magnitude-only data.
    #[arg(long, value_enum, default_value_t = ScaleArg::Linear)]
    pub scale: ScaleArg,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    /// `f_res=path`, e.g. `4.2GHz=run3.csv`; give at least three.
    #[arg(long = "dataset", required = true)]
    pub datasets: Vec<String>,
    /// Free parameter among kappa, beta, length, speed.
    #[arg(long, required = true)]
    pub free: Vec<String>,
    #[command(flatten)]
    pub single: SingleModelArgs,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[arg(long, value_enum, default_value_t = ScaleArg::Linear)]
    pub scale: ScaleArg,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AnisotropyArgs {
    #[command(flatten)]
    pub model: AnisotropyModelArgs,
    /// Angles as start:stop:count.
    #[arg(long, default_value = "0deg:180deg:361")]
    pub angles: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for gse_core::lamb_pv::Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => Self::Plus,
            BranchArg::Minus => Self::Minus,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PvArgs {
    /// Arguments as start:stop:count (dimensionless).
    #[arg(long, default_value = "0.5:50:100")]
    pub x: String,
    #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
    pub branch: BranchArg,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Standard deviation of the noise on each of Re and Im.
    #[arg(long)]
    pub sigma: f64,
    #[command(subcommand)]
    pub source: SynthSource,
}

#[derive(Debug, Clone, Subcommand)]
pub enum SynthSource {
    Single(SingleArgs),
    Nested(NestedArgs),
    General(GeneralArgs),
}
