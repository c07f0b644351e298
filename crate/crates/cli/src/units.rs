//! Command-line quantities. Every value carries an explicit unit suffix and
//! is converted to SI (Hz, rad, T, m, m/s) on parsing.

use std::f64::consts::PI;

// Longer suffixes first so that "MHz" is not read as "Hz".
const FREQUENCY: &[(&str, f64)] = &[("GHz", 1e9), ("MHz", 1e6), ("kHz", 1e3), ("Hz", 1.0)];
const ANGLE: &[(&str, f64)] = &[("deg", PI / 180.0), ("rad", 1.0)];
const FIELD: &[(&str, f64)] = &[("mT", 1e-3), ("T", 1.0)];
const LENGTH: &[(&str, f64)] = &[("mm", 1e-3), ("cm", 1e-2), ("m", 1.0)];
const SPEED: &[(&str, f64)] = &[("m/s", 1.0)];

fn with_units(text: &str, units: &[(&str, f64)], what: &str) -> Result<f64, String> {
    let text = text.trim();
    for &(suffix, factor) in units {
        if let Some(number) = text.strip_suffix(suffix) {
            let v: f64 = number
                .trim()
                .parse()
                .map_err(|_| format!("`{text}` is not a number followed by a {what} unit"))?;
            if !v.is_finite() {
                return Err(format!("`{text}` is not finite"));
            }
            return Ok(v * factor);
        }
    }
    let names: Vec<&str> = units.iter().map(|u| u.0).collect();
    Err(format!("`{text}` needs a {what} unit suffix ({})", names.join(", ")))
}

pub fn frequency(text: &str) -> Result<f64, String> {
    with_units(text, FREQUENCY, "frequency")
}

pub fn angle(text: &str) -> Result<f64, String> {
    with_units(text, ANGLE, "angle")
}

pub fn field(text: &str) -> Result<f64, String> {
    with_units(text, FIELD, "field")
}

pub fn length(text: &str) -> Result<f64, String> {
    with_units(text, LENGTH, "length")
}

pub fn speed(text: &str) -> Result<f64, String> {
    with_units(text, SPEED, "speed")
}

pub fn plain(text: &str) -> Result<f64, String> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{text}` is not a finite number"))
}

/// Parser for a named fit parameter: lengths in m, speeds in m/s, rates and
/// frequencies in Hz.
pub fn for_parameter(name: &str) -> fn(&str) -> Result<f64, String> {
    match name {
        "length" => length,
        "speed" => speed,
        _ => frequency,
    }
}

/// `start:stop:count`, evenly spaced and inclusive at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn parse(text: &str, unit: fn(&str) -> Result<f64, String>) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("`{text}` is not of the form start:stop:count"));
        };
        let count: usize = n.trim().parse().map_err(|_| format!("`{n}` is not a point count"))?;
        if count == 0 {
            return Err("a sweep needs at least one point".into());
        }
        Ok(Self {
            start: unit(a)?,
            stop: unit(b)?,
            count,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}
