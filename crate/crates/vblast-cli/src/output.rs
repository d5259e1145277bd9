//! Numeric formatting, CSV/JSON emission and the run manifest.
//!
//! Every numeric CSV cell is fixed-notation with 12 significant digits and a
//! locale-independent decimal point, so a fixed seed reproduces output files
//! byte for byte.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::AppError;

const SIG_DIGITS: i32 = 12;

/// Fixed-notation rendering with 12 significant digits.
pub fn format_sig(value: f64) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    if value == 0.0 {
        return format!("{:.*}", (SIG_DIGITS - 1) as usize, 0.0);
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS - 1 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

/// One output table: a header and formatted rows.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self, manifest_name: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(name) = manifest_name {
            out.push_str(&format!("# manifest: {name}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, manifest_name: Option<&str>) -> String {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), serde_json::Value::String(v.clone())))
                    .collect()
            })
            .collect();
        let mut doc = serde_json::Map::new();
        if let Some(name) = manifest_name {
            doc.insert("manifest".into(), serde_json::Value::String(name.into()));
        }
        doc.insert("rows".into(), serde_json::to_value(rows).expect("string table"));
        serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("string table")
            + "\n"
    }
}

/// Everything needed to reproduce an emitted data file exactly: the command,
/// the full configuration echo, the seed and the tool version.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub timestamp_unix: u64,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub data_file: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value, data_file: &Path) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool: "vblast".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            timestamp_unix,
            seed,
            config,
            data_file: data_file
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.push_str(".manifest.json");
    out.with_file_name(name)
}

/// Writes the table (and its manifest) to `out`, or the table alone to
/// stdout when no path is given.
pub fn emit(
    table: &Table,
    format: crate::args::OutputFormat,
    out: Option<&Path>,
    manifest: impl FnOnce(&Path) -> RunManifest,
) -> Result<(), AppError> {
    match out {
        Some(path) => {
            let manifest_file = manifest_path(path);
            let manifest_name = manifest_file
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let body = match format {
                crate::args::OutputFormat::Csv => table.to_csv(Some(&manifest_name)),
                crate::args::OutputFormat::Json => table.to_json(Some(&manifest_name)),
            };
            std::fs::write(path, body)?;
            let manifest = manifest(path);
            let manifest_body =
                serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
            std::fs::write(&manifest_file, manifest_body)?;
            Ok(())
        }
        None => {
            let body = match format {
                crate::args::OutputFormat::Csv => table.to_csv(None),
                crate::args::OutputFormat::Json => table.to_json(None),
            };
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}
