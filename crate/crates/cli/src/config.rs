//! Topology configuration files.
//!
//! ```json
//! {
//!   "waveguide": {"speed_mps": 3.26e7},
//!   "emitters": [
//!     {"name": "inner", "f_res_hz": 4.35e9, "beta_hz": 1.58e6,
//!      "points": [{"position_m": 0.0414, "kappa_hz": 0.76e6},
//!                 {"position_m": 0.1242, "kappa_hz": 0.76e6}]}
//!   ],
//!   "probe": {"f_start_hz": 4.3e9, "f_stop_hz": 4.4e9, "n_points": 2001}
//! }
//! ```
//!
//! Errors name the offending value by JSON pointer.

use std::fs;
use std::path::Path;

use gse_core::{Emitter, FrequencyGrid, GseError, Topology, Waveguide};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyConfig {
    pub waveguide: Waveguide,
    pub topology: Topology,
    pub grid: FrequencyGrid,
}

/// One `key=value` override. Keys are dotted paths (`probe.n_points`,
/// `emitters.0.beta_hz`); values are JSON, or taken as strings if they do not
/// parse as JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub path: Vec<String>,
    pub value: Value,
}

impl Override {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let (key, value) = text
            .split_once('=')
            .ok_or_else(|| format!("override `{text}` is not key=value"))?;
        if key.is_empty() {
            return Err(format!("override `{text}` has an empty key"));
        }
        let value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
        Ok(Self {
            path: key.split('.').map(str::to_string).collect(),
            value,
        })
    }

    fn pointer(&self) -> String {
        self.path.iter().map(|p| format!("/{p}")).collect()
    }

    fn apply(&self, root: &mut Value) -> std::result::Result<(), String> {
        let pointer = self.pointer();
        match root.pointer_mut(&pointer) {
            Some(slot) => {
                *slot = self.value.clone();
                Ok(())
            }
            None => Err(format!("override target {pointer} does not exist")),
        }
    }
}

struct Reader<'a> {
    source: &'a str,
}

impl Reader<'_> {
    fn error(&self, pointer: &str, message: impl Into<String>) -> CliError {
        CliError::Schema {
            path: self.source.to_string(),
            pointer: if pointer.is_empty() { "/".into() } else { pointer.into() },
            message: message.into(),
        }
    }

    fn object<'v>(&self, v: &'v Value, pointer: &str, allowed: &[&str]) -> Result<&'v Map<String, Value>> {
        let map = v.as_object().ok_or_else(|| self.error(pointer, "expected an object"))?;
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(self.error(&format!("{pointer}/{k}"), "unknown key"));
        }
        Ok(map)
    }

    fn field<'v>(&self, map: &'v Map<String, Value>, pointer: &str, key: &str) -> Result<&'v Value> {
        map.get(key)
            .ok_or_else(|| self.error(&format!("{pointer}/{key}"), "missing required key"))
    }

    fn number(&self, map: &Map<String, Value>, pointer: &str, key: &str) -> Result<f64> {
        let p = format!("{pointer}/{key}");
        self.field(map, pointer, key)?
            .as_f64()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.error(&p, "expected a finite number"))
    }

    fn count(&self, map: &Map<String, Value>, pointer: &str, key: &str) -> Result<usize> {
        let p = format!("{pointer}/{key}");
        self.field(map, pointer, key)?
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| self.error(&p, "expected a non-negative integer"))
    }

    /// Core validation errors are re-reported at the object they came from.
    fn located(&self, pointer: &str, e: GseError) -> CliError {
        match e {
            GseError::InvalidInput(m) | GseError::NonPhysical(m) => self.error(pointer, m),
            other => self.error(pointer, other.to_string()),
        }
    }

    fn emitter(&self, v: &Value, pointer: &str) -> Result<Emitter> {
        let map = self.object(v, pointer, &["name", "f_res_hz", "beta_hz", "points"])?;
        let name = self
            .field(map, pointer, "name")?
            .as_str()
            .ok_or_else(|| self.error(&format!("{pointer}/name"), "expected a string"))?;
        let f_res = self.number(map, pointer, "f_res_hz")?;
        let beta = self.number(map, pointer, "beta_hz")?;
        let points_ptr = format!("{pointer}/points");
        let points = self
            .field(map, pointer, "points")?
            .as_array()
            .ok_or_else(|| self.error(&points_ptr, "expected an array"))?;
        let mut kappas = Vec::with_capacity(points.len());
        let mut positions = Vec::with_capacity(points.len());
        for (k, point) in points.iter().enumerate() {
            let p = format!("{points_ptr}/{k}");
            let pm = self.object(point, &p, &["position_m", "kappa_hz"])?;
            positions.push(self.number(pm, &p, "position_m")?);
            kappas.push(self.number(pm, &p, "kappa_hz")?);
        }
        Emitter::new(name, f_res, beta, kappas, positions).map_err(|e| self.located(pointer, e))
    }

    fn read(&self, root: &Value) -> Result<TopologyConfig> {
        let top = self.object(root, "", &["waveguide", "emitters", "probe"])?;

        let wg = self.object(self.field(top, "", "waveguide")?, "/waveguide", &["speed_mps"])?;
        let waveguide = Waveguide::new(self.number(wg, "/waveguide", "speed_mps")?)
            .map_err(|e| self.located("/waveguide/speed_mps", e))?;

        let list = self
            .field(top, "", "emitters")?
            .as_array()
            .ok_or_else(|| self.error("/emitters", "expected an array"))?;
        if list.is_empty() {
            return Err(self.error("/emitters", "at least one emitter is required"));
        }
        let emitters = list
            .iter()
            .enumerate()
            .map(|(k, v)| self.emitter(v, &format!("/emitters/{k}")))
            .collect::<Result<Vec<_>>>()?;
        let topology = Topology::new(emitters).map_err(|e| self.located("/emitters", e))?;

        let probe = self.object(self.field(top, "", "probe")?, "/probe", &["f_start_hz", "f_stop_hz", "n_points"])?;
        let grid = FrequencyGrid::new(
            self.number(probe, "/probe", "f_start_hz")?,
            self.number(probe, "/probe", "f_stop_hz")?,
            self.count(probe, "/probe", "n_points")?,
        )
        .map_err(|e| self.located("/probe", e))?;

        Ok(TopologyConfig {
            waveguide,
            topology,
            grid,
        })
    }
}

/// Parses an already-loaded document; `source` names it in error messages.
pub fn parse_topology(mut root: Value, overrides: &[Override], source: &str) -> Result<TopologyConfig> {
    let reader = Reader { source };
    for o in overrides {
        o.apply(&mut root).map_err(|m| reader.error(&o.pointer(), m))?;
    }
    reader.read(&root)
}

pub fn load_topology(path: &Path, overrides: &[Override]) -> Result<TopologyConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let source = path.display().to_string();
    let root: Value = serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: source.clone(),
        pointer: "/".into(),
        message: format!("not valid JSON: {e}"),
    })?;
    parse_topology(root, overrides, &source)
}
