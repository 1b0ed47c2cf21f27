//! Versioned JSON report envelope and CSV emission.
//!
//! JSON is the machine artifact, CSV the plotting hand-off. Reports are
//! deterministic for a fixed config and seed except for the
//! `generated_at` field.

use crate::error::Error;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: u32,
    pub generated_at: String,
    pub command: String,
    pub seed: u64,
    pub body: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &str, seed: u64, body: T) -> Self {
        let generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_else(|_| "0".into());
        Self { schema_version: SCHEMA_VERSION, generated_at, command: command.into(), seed, body }
    }

    pub fn write_json(&self, path: &Path) -> Result<(), Error> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = std::fs::File::create(path)?;
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Report(format!("serialize: {e}")))?;
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

/// Write one CSV table: a header row and numeric-or-string records.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Report(e.to_string()))?;
    w.write_record(header).map_err(|e| Error::Report(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| Error::Report(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Merge previously written report files into one envelope.
pub fn merge_reports(paths: &[std::path::PathBuf], out: &Path) -> Result<(), Error> {
    let mut merged = Vec::with_capacity(paths.len());
    for p in paths {
        let text = std::fs::read_to_string(p)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Report(format!("{}: {e}", p.display())))?;
        merged.push(serde_json::json!({
            "source": p.display().to_string(),
            "report": value,
        }));
    }
    Envelope::new("report merge", 0, merged).write_json(out)
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}
