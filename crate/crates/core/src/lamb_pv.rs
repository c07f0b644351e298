//! Principal-value integrals behind the radiative decay and Lamb shift of a
//! point pair separated by a propagation phase `x`.
//!
//! The raw integrals are
//! `F±(x) = PV ∫₀^∞ u e^{ixu} / (u ± 1) du`, regularised by `e^{-αu}` with
//! `α → 0`. `A = Re F` and `B = Im F`. The closed forms are written with the
//! auxiliary functions `M(x)` and `N(x)` built from `Si` and `Ci`.

use crate::error::{GseError, Result};
use crate::quad::{gk15, integrate};
use crate::special::{ci, si};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Extrapolation residual above which the quadrature is reported as failed.
pub const PV_TOLERANCE: f64 = 1e-5;

/// Sign of the pole term: `Plus` for `u + 1` (no pole on the path), `Minus`
/// for `u − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn pole_offset(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvResult {
    pub argument: f64,
    pub branch: Branch,
    pub a: f64,
    pub b: f64,
    /// Extrapolation residual; zero for closed-form values.
    pub residual: f64,
}

impl PvResult {
    pub fn a_over_pi(&self) -> f64 {
        self.a / PI
    }

    pub fn b_over_pi(&self) -> f64 {
        self.b / PI
    }
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(GseError::InvalidInput(format!("argument must be finite, got {x}")));
    }
    if x == 0.0 {
        return Err(GseError::Divergent(
            "principal-value integrals diverge at zero argument".into(),
        ));
    }
    Ok(())
}

/// `M(x) = [−cos x Ci(x) + sin x (π/2 − Si(x))] / π`, for `x > 0`.
pub fn aux_m(x: f64) -> Result<f64> {
    check_argument(x)?;
    let c = ci(x)?;
    Ok((-x.cos() * c + x.sin() * (FRAC_PI_2 - si(x))) / PI)
}

/// `N(x) = [cos x (π/2 − Si(x)) + sin x Ci(x)] / π`, for `x > 0`.
pub fn aux_n(x: f64) -> Result<f64> {
    check_argument(x)?;
    let c = ci(x)?;
    Ok((x.cos() * (FRAC_PI_2 - si(x)) + x.sin() * c) / PI)
}

/// Closed-form `A` and `B`. `A` is even and `B` odd in `x`.
pub fn pv_closed(x: f64, branch: Branch) -> Result<PvResult> {
    check_argument(x)?;
    let ax = x.abs();
    let m = aux_m(ax)?;
    let n = aux_n(ax)?;
    let (a, b) = match branch {
        Branch::Plus => (-PI * m, 1.0 / ax - PI * n),
        Branch::Minus => (PI * m - PI * ax.sin(), 1.0 / ax - PI * n + PI * ax.cos()),
    };
    Ok(PvResult { argument: x, branch, a, b: b * x.signum(), residual: 0.0 })
}

/// Regularised transform `∫₀^∞ u e^{(ix − α)u} / (u ± 1) du` at fixed `α > 0`,
/// with the `Minus` pole excised symmetrically (half-width `half_width`) and
/// the excised interval folded so the odd part cancels exactly.
fn regularized(x: f64, branch: Branch, alpha: f64, half_width: f64) -> Complex64 {
    let z = Complex64::new(-alpha, x);
    let numer = |u: f64| u * (z * u).exp();
    let s = branch.pole_offset();
    let whole = |u: f64| numer(u) / (u + s);
    let tol = 1e-13;
    let mut total = Complex64::new(0.0, 0.0);
    match branch {
        Branch::Plus => total += integrate(&whole, 0.0, 2.0, tol).0,
        Branch::Minus => {
            total += integrate(&whole, 0.0, 1.0 - half_width, tol).0;
            let fold = |t: f64| (numer(1.0 + t) - numer(1.0 - t)) / t;
            total += integrate(&fold, 0.0, half_width, tol).0;
            total += integrate(&whole, 1.0 + half_width, 2.0, tol).0;
        }
    }
    // Oscillatory tail, one panel per half period, until e^{-αu} is negligible.
    let width = (PI / x.abs()).min(4.0);
    let end = 2.0 + 38.0 / alpha;
    let mut lo = 2.0;
    while lo < end {
        let hi = lo + width;
        let panel = gk15(&whole, lo, hi);
        total += if panel.error < 1e-14 { panel.value } else { integrate(&whole, lo, hi, 1e-14).0 };
        lo = hi;
    }
    total
}

/// Neville extrapolation of `(nodes, values)` to zero; returns the estimate
/// and the change contributed by the last node.
fn extrapolate_to_zero(nodes: &[f64], values: &[Complex64]) -> (Complex64, f64) {
    let n = nodes.len();
    let mut table = values.to_vec();
    let mut previous = table[n - 1];
    for level in 1..n {
        for i in (level..n).rev() {
            let (ai, aj) = (nodes[i], nodes[i - level]);
            table[i] = (table[i] * aj - table[i - 1] * ai) / (aj - ai);
        }
        if level == n - 1 {
            previous = table[n - 2];
        }
    }
    (table[n - 1], (table[n - 1] - previous).norm())
}

/// Numerical principal value by excision plus converging-factor
/// extrapolation. Independent of the closed forms.
pub fn pv_quadrature(x: f64, branch: Branch) -> Result<PvResult> {
    check_argument(x)?;
    const LEVELS: usize = 8;
    // The pole term carries e^{-α}, so α must stay O(1) as well as below|x|.
    let alpha0 = (0.5 * x.abs()).min(0.5);
    let half_width = (1e-3 * x.abs()).min(0.25);
    let nodes: Vec<f64> = (0..LEVELS).map(|k| alpha0 / 2f64.powi(k as i32)).collect();
    let values: Vec<Complex64> = nodes
        .iter()
        .map(|&a| regularized(x, branch, a, half_width))
        .collect();
    let (estimate, mut residual) = extrapolate_to_zero(&nodes, &values);
    if branch == Branch::Minus {
        // Halve the excision and confirm the smallest-α value is unchanged.
        let last = nodes[LEVELS - 1];
        let halved = regularized(x, branch, last, 0.5 * half_width);
        residual = residual.max((halved - values[LEVELS - 1]).norm());
    }
    if !(residual <= PV_TOLERANCE) || !estimate.re.is_finite() || !estimate.im.is_finite() {
        return Err(GseError::QuadratureNotConverged { residual, tolerance: PV_TOLERANCE });
    }
    Ok(PvResult { argument: x, branch, a: estimate.re, b: estimate.im, residual })
}

/// `(2π cos x, −π sin x)`: the per-pair weights of the collective decay and
/// of the coherent shift.
pub fn decay_shift_decomposition(x: f64) -> (f64, f64) {
    (2.0 * PI * x.cos(), -PI * x.sin())
}

/// Sums pair contributions over coupling points given as `(phase, kappa)`
/// with rates in Hz. Returns `(radiative_rate, lamb_shift)`.
pub fn assemble_point_rates(points: &[(f64, f64)]) -> (f64, f64) {
    let mut decay = 0.0;
    let mut shift = 0.0;
    for (p, &(phase_p, kappa_p)) in points.iter().enumerate() {
        for (q, &(phase_q, kappa_q)) in points.iter().enumerate() {
            let weight = (kappa_p * kappa_q).sqrt() / (2.0 * PI);
            let (d, s) = decay_shift_decomposition((phase_p - phase_q).abs());
            decay += weight * d;
            if p != q {
                shift -= weight * s;
            }
        }
    }
    (decay, shift)
}
