//! Browser bindings for the demo page in `www/`.
//!
//! Three operations: a single-ensemble spectrum, a nested detuning map, and a
//! resonance-versus-angle curve. Inputs are in the units the page shows
//! (GHz, MHz, cm, mT); outputs are plain float arrays for canvas drawing.

use gse_core::anisotropy::{angle_sweep, AngleLaw, AnisotropyParams};
use gse_core::nested::{map_nested_vs_detuning, NestedModel};
use gse_core::single::giant_decay;
use gse_core::{presets, s21_single, FrequencyGrid, GseError, PhaseMode, SingleGseParams, Waveguide};
use wasm_bindgen::prelude::*;

/// Sampled curve `y(x)`.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    x: Vec<f64>,
    y: Vec<f64>,
}

#[wasm_bindgen]
impl Curve {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn y(&self) -> Vec<f64> {
        self.y.clone()
    }
}

/// Row-major |S21| in dB; rows follow probe frequency, columns detuning.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    columns: usize,
    rows: usize,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    db: Vec<f64>,
}

#[wasm_bindgen]
impl Heatmap {
    #[wasm_bindgen(getter)]
    pub fn columns(&self) -> usize {
        self.columns
    }
    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[wasm_bindgen(getter)]
    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    #[wasm_bindgen(getter)]
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    #[wasm_bindgen(getter)]
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    #[wasm_bindgen(getter)]
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
    #[wasm_bindgen(getter)]
    pub fn db(&self) -> Vec<f64> {
        self.db.clone()
    }
}

fn js(e: GseError) -> JsError {
    JsError::new(&e.to_string())
}

/// |S21| in dB against detuning from `f_res` in MHz.
pub fn spectrum_curve(
    f_res_ghz: f64,
    kappa_mhz: f64,
    beta_mhz: f64,
    length_cm: f64,
    half_span_mhz: f64,
    points: usize,
) -> Result<Curve, GseError> {
    let f_res = f_res_ghz * 1e9;
    let wg = Waveguide::new(presets::SPEED)?;
    let p = SingleGseParams::new(kappa_mhz * 1e6, beta_mhz * 1e6, length_cm * 1e-2, f_res, wg)?;
    let grid = FrequencyGrid::centered(f_res, half_span_mhz * 1e6, points)?;
    let s = s21_single(&p, &grid, PhaseMode::Resonance)?;
    Ok(Curve {
        x: s.frequencies.iter().map(|f| (f - f_res) / 1e6).collect(),
        y: s.db(),
    })
}

#[wasm_bindgen]
pub fn single_spectrum(
    f_res_ghz: f64,
    kappa_mhz: f64,
    beta_mhz: f64,
    length_cm: f64,
    half_span_mhz: f64,
    points: usize,
) -> Result<Curve, JsError> {
    spectrum_curve(f_res_ghz, kappa_mhz, beta_mhz, length_cm, half_span_mhz, points).map_err(js)
}

/// Giant decay rate in MHz at `f_res`, for the page's readout.
#[wasm_bindgen]
pub fn giant_decay_mhz(f_res_ghz: f64, kappa_mhz: f64, length_cm: f64) -> Result<f64, JsError> {
    let wg = Waveguide::new(presets::SPEED).map_err(js)?;
    let p = SingleGseParams::new(kappa_mhz * 1e6, 0.0, length_cm * 1e-2, f_res_ghz * 1e9, wg).map_err(js)?;
    Ok(giant_decay(&p, p.f_res) / 1e6)
}

/// Detuning map for one of the two fitted nested operating points, with `j`
/// and `gamma` replaced by the caller's values (MHz).
pub fn detuning_heatmap(
    dissipative: bool,
    j_mhz: f64,
    gamma_mhz: f64,
    detuning_mhz: f64,
    columns: usize,
    rows: usize,
) -> Result<Heatmap, GseError> {
    let base = if dissipative {
        presets::dissipative_point()
    } else {
        presets::coherent_point()
    };
    let p = gse_core::nested::FitFormParams {
        j: j_mhz * 1e6,
        gamma: gamma_mhz * 1e6,
        ..base
    };
    if columns < 2 {
        return Err(GseError::InvalidInput("a map needs at least two columns".into()));
    }
    let half = detuning_mhz * 1e6;
    let step = 2.0 * half / (columns - 1) as f64;
    let f_o: Vec<f64> = (0..columns).map(|k| p.f_i - half + step * k as f64).collect();
    let grid = FrequencyGrid::centered(p.f_i, 1.5 * half, rows)?;
    let map = map_nested_vs_detuning(&NestedModel::FitForm(p), &f_o, &grid)?;
    let mut db = vec![0.0; columns * rows];
    for (c, col) in map.columns.iter().enumerate() {
        for (r, v) in col.spectrum.db().into_iter().enumerate() {
            db[r * columns + c] = v;
        }
    }
    Ok(Heatmap {
        columns,
        rows,
        x_min: -detuning_mhz,
        x_max: detuning_mhz,
        y_min: -1.5 * detuning_mhz,
        y_max: 1.5 * detuning_mhz,
        db,
    })
}

#[wasm_bindgen]
pub fn detuning_map(
    dissipative: bool,
    j_mhz: f64,
    gamma_mhz: f64,
    detuning_mhz: f64,
    columns: usize,
    rows: usize,
) -> Result<Heatmap, JsError> {
    detuning_heatmap(dissipative, j_mhz, gamma_mhz, detuning_mhz, columns, rows).map_err(js)
}

/// Resonance in GHz against field angle in degrees.
pub fn angle_curve(bias_mt: f64, span_mhz: f64, points: usize, full: bool) -> Result<Curve, GseError> {
    if points < 2 {
        return Err(GseError::InvalidInput("need at least two angles".into()));
    }
    let ha = AnisotropyParams::anisotropy_for_span(span_mhz * 1e6, gse_core::model::GYROMAGNETIC_HZ_PER_T);
    let p = AnisotropyParams::new(bias_mt * 1e-3, ha)?;
    let degrees: Vec<f64> = (0..points).map(|k| 180.0 * k as f64 / (points - 1) as f64).collect();
    let thetas: Vec<f64> = degrees.iter().map(|d| d.to_radians()).collect();
    let law = if full { AngleLaw::Full } else { AngleLaw::Simple };
    let f = angle_sweep(&p, &thetas, law)?;
    Ok(Curve {
        x: degrees,
        y: f.iter().map(|v| v / 1e9).collect(),
    })
}

#[wasm_bindgen]
pub fn anisotropy_curve(bias_mt: f64, span_mhz: f64, points: usize, full: bool) -> Result<Curve, JsError> {
    angle_curve(bias_mt, span_mhz, points, full).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bright_spectrum_bottoms_at_loss_fraction() {
        let f_res = 11.0 * presets::SPEED / presets::L_I / 1e9;
        let c = spectrum_curve(f_res, 0.76, 1.58, 8.28, 10.0, 2001).unwrap();
        let min = c.y.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - 20.0 * (1.58f64 / 4.62).log10()).abs() < 1e-3, "{min}");
        assert_eq!(c.x[1000], 0.0);
    }

    #[test]
    fn heatmap_is_row_major() {
        let m = detuning_heatmap(false, 1.01, 0.0, 5.0, 11, 21).unwrap();
        assert_eq!(m.db.len(), 11 * 21);
        assert!(m.db.iter().all(|v| v.is_finite() && *v <= 1e-9));
        assert!(detuning_heatmap(false, 1.0, 0.0, 5.0, 1, 21).is_err());
    }

    #[test]
    fn angle_curve_spans_requested_range() {
        let c = angle_curve(155.0, 330.0, 361, false).unwrap();
        let span = c.y.iter().cloned().fold(f64::MIN, f64::max) - c.y.iter().cloned().fold(f64::MAX, f64::min);
        assert!((span * 1e3 - 330.0).abs() < 0.5, "{span}");
        assert_eq!(c.x[360], 180.0);
    }
}
