//! File writers: RFC-4180 CSV with full-precision scientific notation, JSON
//! documents, and the metadata sidecar that accompanies every CSV.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Shortest scientific representation that round-trips the f64 exactly
/// (`1.5e0`, `-2.5e-10`, `NaN`, `inf`).
pub fn sci(x: f64) -> String {
    format!("{x:e}")
}

/// `sci` for optional values; `None` becomes an empty field.
pub fn sci_opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// `profile.csv` → `profile.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

/// Metadata written next to CSV output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub generator: String,
    pub command: String,
    /// Full configuration that produced the data.
    pub config: serde_json::Value,
    /// Column names per CSV file described by this sidecar.
    pub files: Vec<FileColumns>,
    /// Command-specific derived values (not needed to reproduce the data).
    #[serde(default)]
    pub summary: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileColumns {
    pub file: String,
    pub columns: Vec<String>,
}

impl Sidecar {
    pub fn new(command: &str, config: &impl Serialize) -> Result<Self> {
        Ok(Sidecar {
            generator: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
            command: command.into(),
            config: serde_json::to_value(config)?,
            files: Vec::new(),
            summary: serde_json::Value::Null,
        })
    }

    pub fn with_file(mut self, path: &Path, columns: &[String]) -> Self {
        let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        self.files.push(FileColumns { file, columns: columns.to_vec() });
        self
    }

    pub fn with_summary(mut self, summary: &impl Serialize) -> Result<Self> {
        self.summary = serde_json::to_value(summary)?;
        Ok(self)
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

/// Writes a CSV file: header plus rows of already formatted fields.
pub fn write_csv<I>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(CliError::io(path))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(CliError::io(path))
}

/// Writes `path` and its sidecar `path.meta.json`.
pub fn write_csv_with_sidecar<I>(path: &Path, header: &[String], rows: I, sidecar: Sidecar) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    write_csv(path, header, rows)?;
    write_json(&sidecar_path(path), &sidecar.with_file(path, header))
}

pub fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_round_trips() {
        for x in [0.0, 1.0, -2.5e-10, std::f64::consts::PI, 1e300, f64::MIN_POSITIVE, 0.1 + 0.2] {
            let s = sci(x);
            assert!(s.contains('e'), "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(sci(1.5), "1.5e0");
        assert_eq!(sci_opt(None), "");
    }

    #[test]
    fn sidecar_naming() {
        assert_eq!(sidecar_path(Path::new("out/profile.csv")), PathBuf::from("out/profile.meta.json"));
    }

    #[test]
    fn csv_quotes_per_rfc4180() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(&path, &columns(&["a", "b"]), vec![vec!["x,y".to_string(), "say \"hi\"".to_string()]]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a,b\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n");
    }
}
