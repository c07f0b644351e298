//! First-order magnetocrystalline anisotropy of a cubic (YIG) sphere rotated in
//! the (110) plane: crystal orientation to Kittel-mode frequency.

use std::f64::consts::FRAC_PI_4;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, GseError, Result};
use crate::model::GYROMAGNETIC_HZ_PER_T;

/// Above this `|H_A| / H_e0` the small-anisotropy law is flagged as unreliable.
pub const SMALL_ANISOTROPY_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyParams {
    /// Bias field, T.
    pub bias: f64,
    /// First-order anisotropy field, T (signed).
    pub anisotropy: f64,
    /// γ/2π, Hz/T.
    pub gamma: f64,
    /// Azimuth of the rotation plane, rad.
    pub phi0: f64,
    /// Saturation magnetisation, A/m. Only the demagnetisation tensor uses it.
    pub magnetization: f64,
}

impl AnisotropyParams {
    pub fn new(bias: f64, anisotropy: f64) -> Result<Self> {
        let p = Self {
            bias,
            anisotropy,
            gamma: GYROMAGNETIC_HZ_PER_T,
            phi0: FRAC_PI_4,
            magnetization: 1.4e5,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("bias", self.bias),
            ("anisotropy", self.anisotropy),
            ("gamma", self.gamma),
            ("phi0", self.phi0),
            ("magnetization", self.magnetization),
        ] {
            ensure_finite(name, v)?;
        }
        if self.bias <= 0.0 {
            return Err(GseError::InvalidInput("bias field must be positive".into()));
        }
        if self.anisotropy.abs() / self.bias > SMALL_ANISOTROPY_LIMIT {
            warn!(
                "|H_A|/H_e0 = {:.3} exceeds {SMALL_ANISOTROPY_LIMIT}; the small-anisotropy law is inaccurate",
                self.anisotropy.abs() / self.bias
            );
        }
        Ok(())
    }

    /// Anisotropy field that gives a peak-to-peak tuning range `span_hz` under the
    /// small-anisotropy law.
    pub fn anisotropy_for_span(span_hz: f64, gamma: f64) -> f64 {
        span_hz / (gamma * ANGULAR_SPAN)
    }
}

/// Effective demagnetisation tensor components of the anisotropy field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemagTensor {
    pub n11: f64,
    pub n22: f64,
    pub n12: f64,
    pub n33: f64,
}

pub fn demag_tensor(theta: f64, phi0: f64, anisotropy: f64, magnetization: f64) -> Result<DemagTensor> {
    if magnetization == 0.0 || !magnetization.is_finite() {
        return Err(GseError::InvalidInput("magnetization must be finite and non-zero".into()));
    }
    let r = anisotropy / magnetization;
    let s2 = theta.sin().powi(2);
    let s2p = (2.0 * phi0).sin().powi(2);
    Ok(DemagTensor {
        n11: -3.0 * r * s2 * s2p,
        n22: -3.0 * r * s2 * (1.0 - 0.25 * s2p),
        n12: -3.0 * r * s2 * theta.cos() * (4.0 * phi0).sin(),
        n33: r * (1.0 + (2.0 * theta).cos().powi(2) - theta.sin().powi(4) * s2p),
    })
}

/// Resonance frequency from the full quadratic expression, Hz.
pub fn resonance_full(p: &AnisotropyParams, theta: f64) -> Result<f64> {
    let h = p.bias;
    let a = p.anisotropy;
    let s2p = (2.0 * p.phi0).sin().powi(2);
    let c2 = (2.0 * theta).cos();
    let c4 = (4.0 * theta).cos();
    let first = h + a * (1.5 + 0.5 * c4 + (-15.0 / 8.0 + 2.0 * c2 - c4 / 8.0) * s2p);
    let second = h + a * (2.0 * c4 + (0.5 * c2 - 0.5 * c4) * s2p);
    let cross = 2.25
        * a
        * a
        * theta.sin().powi(2)
        * (2.0 * theta).sin().powi(2)
        * (4.0 * p.phi0).sin().powi(2);
    let radicand = first * second - cross;
    if !(radicand > 0.0) {
        return Err(GseError::NonPhysical(format!(
            "negative radicand {radicand:e} T² at theta = {theta}"
        )));
    }
    Ok(p.gamma * radicand.sqrt())
}

/// `−3/16 + 5/4 cos 2θ + 15/16 cos 4θ`.
pub fn angular_factor(theta: f64) -> f64 {
    -3.0 / 16.0 + 1.25 * (2.0 * theta).cos() + 15.0 / 16.0 * (4.0 * theta).cos()
}

pub fn angular_factor_derivative(theta: f64) -> f64 {
    -2.5 * (2.0 * theta).sin() - 3.75 * (4.0 * theta).sin()
}

/// Largest value of the angular factor, reached at θ = 0.
pub const ANGULAR_MAX: f64 = 2.0;
/// Smallest value, reached where cos 2θ = −1/3.
pub const ANGULAR_MIN: f64 = -4.0 / 3.0;
pub const ANGULAR_SPAN: f64 = ANGULAR_MAX - ANGULAR_MIN;

/// Resonance frequency to first order in `H_A / H_e0`, Hz.
pub fn resonance_simple(p: &AnisotropyParams, theta: f64) -> f64 {
    p.gamma * (p.bias + p.anisotropy * angular_factor(theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleLaw {
    Full,
    Simple,
}

pub fn angle_sweep(p: &AnisotropyParams, thetas: &[f64], law: AngleLaw) -> Result<Vec<f64>> {
    thetas
        .iter()
        .map(|&t| match law {
            AngleLaw::Full => resonance_full(p, t),
            AngleLaw::Simple => Ok(resonance_simple(p, t)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn tensor_examples() {
        let (ha, m0) = (3.5e-3, 1.4e5);
        let t = demag_tensor(0.0, FRAC_PI_4, ha, m0).unwrap();
        assert_eq!((t.n11, t.n22, t.n12), (0.0, 0.0, 0.0));
        assert_relative_eq!(t.n33, 2.0 * ha / m0, max_relative = 1e-15);
        let t = demag_tensor(FRAC_PI_2, FRAC_PI_4, ha, m0).unwrap();
        assert_relative_eq!(t.n11, -3.0 * ha / m0, max_relative = 1e-15);
        assert!(t.n12.abs() < 1e-15 * ha / m0);
        let t = demag_tensor(0.7, 0.3, 0.0, m0).unwrap();
        assert_eq!([t.n11, t.n22, t.n12, t.n33].map(f64::abs), [0.0; 4]);
        assert!(demag_tensor(0.7, 0.3, ha, 0.0).is_err());
    }

    #[test]
    fn isotropic_limit() {
        let p = AnisotropyParams::new(0.155, 0.0).unwrap();
        for t in [0.0, 0.3, 1.1, 2.5] {
            assert_eq!(resonance_full(&p, t).unwrap(), 28e9 * 0.155);
            assert_eq!(resonance_simple(&p, t), 28e9 * 0.155);
        }
    }

    #[test]
    fn full_matches_simple_on_hard_axis() {
        let p = AnisotropyParams::new(0.155, 0.155e-3).unwrap();
        assert_relative_eq!(
            resonance_full(&p, 0.0).unwrap(),
            resonance_simple(&p, 0.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn simple_law_special_angles() {
        let p = AnisotropyParams::new(0.155, 3.5e-3).unwrap();
        assert_relative_eq!(resonance_simple(&p, 0.0), 28e9 * (0.155 + 2.0 * 3.5e-3), max_relative = 1e-15);
        assert_relative_eq!(
            resonance_simple(&p, FRAC_PI_2),
            28e9 * (0.155 - 0.5 * 3.5e-3),
            max_relative = 1e-15
        );
        let theta_min = 0.5 * (-1.0f64 / 3.0).acos();
        assert_relative_eq!(angular_factor(theta_min), ANGULAR_MIN, epsilon = 1e-15);
        assert_relative_eq!(ANGULAR_SPAN, 10.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn sin_4phi_term_vanishes_at_quarter_pi() {
        // the cross term only matters off φ0 = π/4
        let mut p = AnisotropyParams::new(0.155, 5e-3).unwrap();
        let on = resonance_full(&p, 0.6).unwrap();
        p.phi0 = 0.3;
        let off = resonance_full(&p, 0.6).unwrap();
        assert!((on - off).abs() > 1e3);
        assert!((4.0 * FRAC_PI_4).sin().abs() < 1e-15);
    }

    #[test]
    fn unphysical_radicand_rejected() {
        let p = AnisotropyParams {
            bias: 0.01,
            anisotropy: 0.02,
            gamma: 28e9,
            phi0: FRAC_PI_4,
            magnetization: 1.4e5,
        };
        assert!(resonance_full(&p, FRAC_PI_2).is_err());
    }

    #[test]
    fn sweep_edge_cases() {
        let p = AnisotropyParams::new(0.155, 0.0).unwrap();
        assert!(angle_sweep(&p, &[], AngleLaw::Full).unwrap().is_empty());
        let f = angle_sweep(&p, &[0.0, 0.5, 1.0, 3.0], AngleLaw::Simple).unwrap();
        assert!(f.iter().all(|&x| x == f[0]));
    }

    #[test]
    fn quadratic_convergence_of_full_to_simple() {
        let theta = 0.4;
        let err = |ha: f64| {
            let p = AnisotropyParams::new(0.155, ha).unwrap();
            (resonance_full(&p, theta).unwrap() - resonance_simple(&p, theta)).abs()
        };
        let e1 = err(4e-3);
        let e2 = err(2e-3);
        let e3 = err(1e-3);
        assert_relative_eq!(e1 / e2, 4.0, max_relative = 0.05);
        assert_relative_eq!(e2 / e3, 4.0, max_relative = 0.05);
    }

    #[test]
    fn stationary_points() {
        let theta_min = 0.5 * (-1.0f64 / 3.0).acos();
        for t in [0.0, FRAC_PI_2, theta_min, PI - theta_min] {
            assert!(angular_factor_derivative(t).abs() < 1e-14);
            let h = 1e-6;
            let fd = (angular_factor(t + h) - angular_factor(t - h)) / (2.0 * h);
            assert!((fd - angular_factor_derivative(t)).abs() < 1e-8);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn even_and_pi_periodic(t in -10.0f64..10.0) {
                prop_assert!((angular_factor(t) - angular_factor(-t)).abs() < 1e-13);
                prop_assert!((angular_factor(t) - angular_factor(t + PI)).abs() < 1e-12);
                prop_assert!(angular_factor(t) <= ANGULAR_MAX + 1e-15);
                prop_assert!(angular_factor(t) >= ANGULAR_MIN - 1e-15);
            }

            #[test]
            fn derivative_matches_finite_difference(t in -3.0f64..3.0) {
                let h = 1e-5;
                let fd = (angular_factor(t + h) - angular_factor(t - h)) / (2.0 * h);
                prop_assert!((fd - angular_factor_derivative(t)).abs() < 1e-8);
            }
        }
    }
}
