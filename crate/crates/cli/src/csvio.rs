//! Deterministic CSV emission: 9-significant-digit floats, comment headers
//! carrying the fully resolved configuration, byte-identical across runs.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Format a float with 9 significant digits; −0 collapses to 0 so equal
/// values always print identically.
pub fn fmt9(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.8e}")
}

pub struct CsvFile {
    lines: Vec<String>,
}

impl CsvFile {
    pub fn new(command: &str) -> Self {
        CsvFile { lines: vec![format!("# ptsim {command}")] }
    }

    pub fn comment(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("# {key} = {value}"));
    }

    pub fn header(&mut self, columns: &str) {
        self.lines.push(columns.to_string());
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CliError> {
        let file = std::fs::File::create(path).map_err(CliError::Io)?;
        let mut w = std::io::BufWriter::new(file);
        for line in &self.lines {
            writeln!(w, "{line}").map_err(CliError::Io)?;
        }
        w.flush().map_err(CliError::Io)
    }
}

/// `stem_suffix.ext` next to the configured output path.
pub fn with_suffix(path: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}
