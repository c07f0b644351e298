//! CSV emission and spectrum ingestion.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so parsing
//! an emitted file gives back the exact doubles.

use std::path::Path;

use gse_core::fitting::{FitData, Observations};
use gse_core::lamb_pv::PvResult;
use gse_core::nested::EigenTraces;
use gse_core::single::TransmissionMap;
use gse_core::Spectrum;
use num_complex::Complex64;

use crate::error::{CliError, Result};

pub const SPECTRUM_HEADER: &str = "frequency_hz,s21_re,s21_im,s21_mag,s21_db";
pub const MAP_HEADER: &str = "sweep_value,frequency_hz,s21_mag,s21_db";
pub const TRACES_HEADER: &str = "sweep_value,re1_hz,im1_hz,re2_hz,im2_hz";
pub const ANGLE_HEADER: &str = "theta_rad,frequency_hz";
pub const PV_HEADER: &str = "x,a_closed,a_quad,b_closed,b_quad,abs_err_a,abs_err_b";

struct Csv(String);

impl Csv {
    fn new(header: &str) -> Self {
        Csv(format!("{header}\n"))
    }

    fn row(&mut self, values: &[f64]) {
        for (k, v) in values.iter().enumerate() {
            if k > 0 {
                self.0.push(',');
            }
            self.0.push_str(&v.to_string());
        }
        self.0.push('\n');
    }

    fn into_bytes(self) -> Vec<u8> {
        self.0.into_bytes()
    }
}

pub fn spectrum_csv(s: &Spectrum) -> Vec<u8> {
    let mut out = Csv::new(SPECTRUM_HEADER);
    for ((f, v), db) in s.frequencies.iter().zip(&s.s21).zip(s.db()) {
        out.row(&[*f, v.re, v.im, v.norm(), db]);
    }
    out.into_bytes()
}

/// Long format, one row per (column, frequency). `sweep_value` is whatever the
/// caller stored in each column.
pub fn map_csv(map: &TransmissionMap) -> Vec<u8> {
    let mut out = Csv::new(MAP_HEADER);
    for r in map.rows() {
        out.row(&[r.sweep_value, r.frequency, r.magnitude, r.db]);
    }
    out.into_bytes()
}

pub fn traces_csv(traces: &EigenTraces, sweep_values: &[f64]) -> Vec<u8> {
    let mut out = Csv::new(TRACES_HEADER);
    for (x, [a, b]) in sweep_values.iter().zip(&traces.branches) {
        out.row(&[*x, a.re, a.im, b.re, b.im]);
    }
    out.into_bytes()
}

pub fn angle_csv(thetas: &[f64], frequencies: &[f64]) -> Vec<u8> {
    let mut out = Csv::new(ANGLE_HEADER);
    for (t, f) in thetas.iter().zip(frequencies) {
        out.row(&[*t, *f]);
    }
    out.into_bytes()
}

pub fn pv_csv(rows: &[(PvResult, PvResult)]) -> Vec<u8> {
    let mut out = Csv::new(PV_HEADER);
    for (c, q) in rows {
        out.row(&[c.argument, c.a, q.a, c.b, q.b, (c.a - q.a).abs(), (c.b - q.b).abs()]);
    }
    out.into_bytes()
}

enum Layout {
    Complex { re: usize, im: usize },
    Magnitude(usize),
    Decibel(usize),
}

fn find(header: &csv::StringRecord, names: &[&str]) -> Option<usize> {
    header
        .iter()
        .position(|h| names.iter().any(|n| h.trim().eq_ignore_ascii_case(n)))
}

/// Reads a spectrum with a header row. A frequency column is required; the
/// values are taken from a real/imaginary pair if present, else from a
/// magnitude column, else from a dB column. Complex files become complex fit
/// data and the others magnitude-only fit data.
pub fn ingest_spectrum(path: &Path) -> Result<FitData> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(file);
    let data_err = |line: u64, message: String| CliError::Data {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(csv_error(path, e)),
        None => return Err(data_err(1, "file is empty".into())),
    };
    let freq = find(&header, &["frequency_hz", "frequency", "freq_hz", "f_hz"])
        .ok_or_else(|| data_err(1, "header has no frequency column (expected `frequency_hz`)".into()))?;
    let layout = match (find(&header, &["s21_re", "re"]), find(&header, &["s21_im", "im"])) {
        (Some(re), Some(im)) => Layout::Complex { re, im },
        _ => match (find(&header, &["s21_mag", "mag", "magnitude"]), find(&header, &["s21_db", "db"])) {
            (Some(m), _) => Layout::Magnitude(m),
            (None, Some(d)) => Layout::Decibel(d),
            (None, None) => {
                return Err(data_err(
                    1,
                    "header has neither s21_re/s21_im nor s21_mag nor s21_db columns".into(),
                ))
            }
        },
    };

    let mut frequencies = Vec::new();
    let mut complex = Vec::new();
    let mut magnitude = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |k: usize| -> Result<f64> {
            let text = record
                .get(k)
                .ok_or_else(|| data_err(line, format!("missing column {}", k + 1)))?;
            text.parse::<f64>()
                .map_err(|_| data_err(line, format!("`{text}` is not a number")))
        };
        let f = cell(freq)?;
        if !f.is_finite() {
            return Err(data_err(line, format!("frequency {f} is not finite")));
        }
        if let Some(&prev) = frequencies.last() {
            if f == prev {
                return Err(data_err(line, format!("duplicate frequency {f}")));
            }
            if f < prev {
                return Err(data_err(line, format!("frequency {f} is below the previous row ({prev})")));
            }
        }
        frequencies.push(f);
        match layout {
            Layout::Complex { re, im } => complex.push(Complex64::new(cell(re)?, cell(im)?)),
            Layout::Magnitude(m) => magnitude.push(cell(m)?),
            Layout::Decibel(d) => magnitude.push(10f64.powf(cell(d)? / 20.0)),
        }
    }
    if frequencies.is_empty() {
        return Err(data_err(1, "no data rows".into()));
    }
    let observations = match layout {
        Layout::Complex { .. } => Observations::Complex(complex),
        _ => Observations::Magnitude(magnitude),
    };
    Ok(FitData::new(frequencies, observations)?)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        kind => CliError::Data {
            path: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gse_core::FrequencyGrid;
    use std::io::Write;

    fn temp_file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn line_of(r: Result<FitData>) -> u64 {
        match r {
            Err(CliError::Data { line, .. }) => line,
            other => panic!("expected a data error, got {other:?}"),
        }
    }

    #[test]
    fn written_spectrum_reads_back_exactly() {
        let grid = FrequencyGrid::new(4.3e9, 4.4e9, 7).unwrap();
        let s21: Vec<Complex64> = (0..7).map(|k| Complex64::new(0.1 * k as f64 + 1e-17, -1.0 / 3.0)).collect();
        let s = Spectrum::new(grid.frequencies(), s21.clone()).unwrap();
        let f = temp_file(std::str::from_utf8(&spectrum_csv(&s)).unwrap());
        let data = ingest_spectrum(f.path()).unwrap();
        assert_eq!(data.frequencies, grid.frequencies());
        assert_eq!(data.observations, Observations::Complex(s21));
    }

    #[test]
    fn magnitude_only_files_give_magnitude_data() {
        let f = temp_file("frequency_hz,s21_mag\n1e9,0.5\n2e9,0.25\n");
        let data = ingest_spectrum(f.path()).unwrap();
        assert_eq!(data.observations, Observations::Magnitude(vec![0.5, 0.25]));
        let d = temp_file("frequency_hz,s21_db\n1e9,-20\n2e9,0\n");
        match ingest_spectrum(d.path()).unwrap().observations {
            Observations::Magnitude(m) => assert!((m[0] - 0.1).abs() < 1e-15 && m[1] == 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_rows_report_line_numbers() {
        assert_eq!(line_of(ingest_spectrum(temp_file("1e9,0.5\n2e9,0.4\n").path())), 1);
        let dup = temp_file("frequency_hz,s21_mag\n1e9,0.5\n2e9,0.4\n2e9,0.3\n");
        assert_eq!(line_of(ingest_spectrum(dup.path())), 4);
        let unsorted = temp_file("frequency_hz,s21_mag\n1e9,0.5\n3e9,0.4\n2e9,0.3\n");
        assert_eq!(line_of(ingest_spectrum(unsorted.path())), 4);
        let junk = temp_file("frequency_hz,s21_re,s21_im\n1e9,0.5,0\n2e9,abc,0\n");
        assert_eq!(line_of(ingest_spectrum(junk.path())), 3);
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let e = ingest_spectrum(Path::new("/nonexistent/spectrum.csv")).unwrap_err();
        assert_eq!(e.exit_code(), 4);
    }
}
