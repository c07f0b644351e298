//! Scattering models for giant spin ensembles coupled to a waveguide at
//! several points: single and nested ensembles, a general multipoint engine,
//! anisotropy-driven tuning, principal-value rate integrals and fitting.

pub mod analysis;
pub mod anisotropy;
pub mod error;
pub mod fitting;
pub mod lamb_pv;
pub mod model;
pub mod multipoint;
pub mod nested;
mod par;
pub mod presets;
pub mod quad;
pub mod single;
pub mod special;
pub mod synth;

pub use error::{GseError, Result};
pub use model::{
    classify_topology, field_to_frequency, phase, Classification, Emitter, FrequencyGrid, Phase,
    Spectrum, Topology, Waveguide,
};
pub use single::{s21_single, PhaseMode, SingleGseParams};
