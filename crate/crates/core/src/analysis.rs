//! Dip detection and width measurements on sampled magnitude curves.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    pub index: usize,
    pub frequency: f64,
    pub value: f64,
    /// Height of the lower of the two enclosing maxima above the dip.
    pub prominence: f64,
}

/// Local minima whose topographic prominence is at least `min_prominence`,
/// most prominent first.
pub fn find_dips(frequencies: &[f64], values: &[f64], min_prominence: f64) -> Vec<Dip> {
    let n = values.len().min(frequencies.len());
    let mut dips = Vec::new();
    let mut k = 0;
    while k < n {
        // Collapse flat bottoms to their centre.
        let mut end = k;
        while end + 1 < n && values[end + 1] == values[k] {
            end += 1;
        }
        let left_higher = k == 0 || values[k - 1] > values[k];
        let right_higher = end + 1 == n || values[end + 1] > values[k];
        if left_higher && right_higher && n > 1 {
            let index = (k + end) / 2;
            let prominence = prominence(values, k, end);
            if prominence >= min_prominence {
                dips.push(Dip { index, frequency: frequencies[index], value: values[index], prominence });
            }
        }
        k = end + 1;
    }
    dips.sort_by(|a, b| b.prominence.total_cmp(&a.prominence));
    dips
}

fn prominence(values: &[f64], start: usize, end: usize) -> f64 {
    let floor = values[start];
    let mut left_max = floor;
    for &v in values[..start].iter().rev() {
        if v < floor {
            break;
        }
        left_max = left_max.max(v);
    }
    let mut right_max = floor;
    for &v in &values[end + 1..] {
        if v < floor {
            break;
        }
        right_max = right_max.max(v);
    }
    // An edge with no lower point beyond it counts as its highest sample.
    left_max.min(right_max) - floor
}

/// Full width of the dip at `index`, measured where the curve crosses halfway
/// between `baseline` and the dip value. `None` if a side never recovers.
pub fn half_depth_width(frequencies: &[f64], values: &[f64], index: usize, baseline: f64) -> Option<f64> {
    let level = 0.5 * (baseline + values[index]);
    let crossing = |a: usize, b: usize| {
        let t = (level - values[a]) / (values[b] - values[a]);
        frequencies[a] + t * (frequencies[b] - frequencies[a])
    };
    let mut lo = None;
    for k in (0..index).rev() {
        if values[k] >= level {
            lo = Some(crossing(k + 1, k));
            break;
        }
    }
    let mut hi = None;
    for k in index + 1..values.len() {
        if values[k] >= level {
            hi = Some(crossing(k - 1, k));
            break;
        }
    }
    Some(hi? - lo?)
}

/// Frequency gap between the two most prominent dips, if there are two.
pub fn dip_separation(frequencies: &[f64], values: &[f64], min_prominence: f64) -> Option<f64> {
    let dips = find_dips(frequencies, values, min_prominence);
    if dips.len() < 2 {
        return None;
    }
    Some((dips[0].frequency - dips[1].frequency).abs())
}

/// Vertex of the parabola through three samples around `k`; falls back to the
/// sample itself at the edges.
pub fn refine_extremum(x: &[f64], y: &[f64], k: usize) -> f64 {
    if k == 0 || k + 1 >= x.len() {
        return x[k];
    }
    let (x0, x1, x2) = (x[k - 1], x[k], x[k + 1]);
    let (y0, y1, y2) = (y[k - 1], y[k], y[k + 1]);
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let curvature = (d1 - d0) / (x2 - x0);
    if curvature == 0.0 {
        return x1;
    }
    0.5 * (x0 + x1) - d0 / (2.0 * curvature)
}
