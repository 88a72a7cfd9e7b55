//! CSV rendering, run manifests and atomic file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Significant digits for every float written to CSV.
pub const SIG_DIGITS: usize = 12;

/// Formats `v` with [`SIG_DIGITS`] significant digits. Fixed-point when the
/// decimal exponent is in `[-5, 11]`, scientific otherwise; trailing zeros
/// are dropped.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..=11).contains(&exp) {
        let prec = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.prec$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

/// `v` rounded to `digits` significant digits, for human-readable reports.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..=6).contains(&exp) {
        let shift = 10f64.powi(digits as i32 - 1 - exp);
        let rounded = (v * shift).round() / shift;
        let prec = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{rounded:.prec$}")
    } else {
        format!("{:.*e}", digits.saturating_sub(1), v)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Index of the column named `name`.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Float values of a column; non-float cells are skipped.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter_map(|r| match r[i] {
                Cell::Float(v) => Some(v),
                _ => None,
            })
            .collect()
    }

    /// RFC 4180: header row, CRLF line endings, quoting where needed.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().context("flushing CSV buffer")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
    pub output: String,
    pub output_sha256: String,
}

impl RunManifest {
    pub fn new<P: Serialize>(
        command: &str,
        parameters: &P,
        seed: Option<u64>,
        output: &Path,
        csv: &[u8],
    ) -> Result<Self> {
        Ok(Self {
            command: command.to_string(),
            parameters: serde_json::to_value(parameters)?,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            output: output
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            output_sha256: sha256_hex(csv),
        })
    }
}

/// `<out>.manifest.json`
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes the CSV and its manifest sidecar. Returns the manifest.
pub fn write_outputs<P: Serialize>(
    out: &Path,
    command: &str,
    parameters: &P,
    seed: Option<u64>,
    table: &Table,
) -> Result<RunManifest> {
    let csv = table.to_csv()?;
    let manifest = RunManifest::new(command, parameters, seed, out, &csv)?;
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    write_atomic(out, &csv)?;
    write_atomic(&manifest_path(out), &json)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(format_float(std::f64::consts::PI * 1e5), "314159.265359");
        assert_eq!(format_float(1.5e-7), "1.5e-7");
        assert_eq!(format_float(1.0 / 3.0 * 1e-9), "3.33333333333e-10");
        assert_eq!(format_float(6.02e23), "6.02e23");
        assert_eq!(format_float(0.99999999999999), "1");
        assert_eq!(format_float(1.2345e-5), "0.000012345");
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.0066015, 2), "0.0066");
        assert_eq!(format_sig(64.0, 2), "64");
        assert_eq!(format_sig(86_946.0, 2), "87000");
        assert_eq!(format_sig(294.96, 2), "290");
    }

    #[test]
    fn csv_uses_crlf_and_quotes() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::from(0.25), Cell::from("x,y")]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "a,b\r\n0.25,\"x,y\"\r\n");
    }

    #[test]
    fn manifest_sidecar_name() {
        assert_eq!(
            manifest_path(Path::new("out/fig3.csv")),
            PathBuf::from("out/fig3.csv.manifest.json")
        );
    }
}
