//! Sine and cosine integrals.

use crate::error::{GseError, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 4.0;

/// Sine integral `Si(x) = ∫₀ˣ sin t / t dt`. Odd in `x`.
pub fn si(x: f64) -> f64 {
    if x < 0.0 {
        return -si(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= SERIES_LIMIT {
        si_series(x)
    } else {
        si_ci_fraction(x).0
    }
}

/// Cosine integral `Ci(x) = γ + ln x + ∫₀ˣ (cos t − 1)/t dt` for `x > 0`.
pub fn ci(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(GseError::InvalidInput(format!("ci needs a finite x > 0, got {x}")));
    }
    Ok(if x <= SERIES_LIMIT {
        ci_series(x)
    } else {
        si_ci_fraction(x).1
    })
}

fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x; // x^(2k+1) / (2k+1)!
    let mut sum = x;
    for k in 1..60 {
        let n = (2 * k) as f64;
        term *= -x2 / (n * (n + 1.0));
        let add = term / (n + 1.0);
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn ci_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0; // x^(2k) / (2k)!
    let mut sum = 0.0;
    for k in 1..60 {
        let n = (2 * k) as f64;
        term *= -x2 / ((n - 1.0) * n);
        let add = term / n;
        sum += add;
        if add.abs() < 1e-18 * (sum.abs() + 1.0) {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

/// Lentz evaluation of the continued fraction for `E1(ix)`; good for x ≳ 2.
fn si_ci_fraction(x: f64) -> (f64, f64) {
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..10_000 {
        let a = -((i - 1) * (i - 1)) as f64;
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    let h = Complex64::from_polar(1.0, -x) * h;
    (FRAC_PI_2 + h.im, -h.re)
}
