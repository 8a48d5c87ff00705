//! Deterministic output plumbing: 17-significant-digit numbers, minimally
//! quoted CSV, and the run manifest.
//!
//! Every data file is fully assembled in memory before anything touches the
//! filesystem, so a failing run never leaves a half-written table behind.
//! The manifest is the only output containing a timestamp; the data files
//! are byte-identical across reruns of the same effective config.

use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Formats a float with 17 significant digits — enough to reparse to the
/// identical value. Non-finite values abort instead of leaking into a file.
pub fn fmt_num(value: f64) -> Result<String, String> {
    if !value.is_finite() {
        return Err(format!("refusing to emit non-finite number {value}"));
    }
    Ok(format!("{value:.16e}"))
}

fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// An in-memory CSV table with a fixed header.
pub struct Csv {
    columns: usize,
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Csv {
        let mut csv = Csv {
            columns: header.len(),
            text: String::new(),
        };
        csv.push(header.iter().map(|cell| cell.to_string()));
        csv
    }

    fn push(&mut self, cells: impl IntoIterator<Item = String>) {
        let mut count = 0;
        for (index, cell) in cells.into_iter().enumerate() {
            if index > 0 {
                self.text.push(',');
            }
            self.text.push_str(&csv_field(&cell));
            count += 1;
        }
        assert_eq!(count, self.columns, "row width must match the header");
        self.text.push('\n');
    }

    pub fn row(&mut self, cells: impl IntoIterator<Item = String>) {
        self.push(cells);
    }

    pub fn into_text(self) -> String {
        self.text
    }
}

/// One output file, assembled but not yet written.
pub struct Rendered {
    pub name: &'static str,
    pub content: String,
}

/// Provenance record written alongside every run's data files.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    /// SHA-256 of the canonical effective config (overrides applied).
    pub config_sha256: String,
    pub master_seed: u64,
    pub version: &'static str,
    /// Wall-clock write time — the only non-deterministic output field.
    pub unix_time_s: u64,
    pub outputs: Vec<String>,
}

/// Writes every rendered file plus a manifest naming them into `dir`,
/// creating the directory if needed. Returns the file list written.
pub fn write_all(
    dir: &Path,
    rendered: Vec<Rendered>,
    config_sha256: String,
    master_seed: u64,
) -> Result<Vec<PathBuf>, String> {
    std::fs::create_dir_all(dir)
        .map_err(|err| format!("cannot create output directory {}: {err}", dir.display()))?;
    let mut written = Vec::new();
    let mut names = Vec::new();
    for file in &rendered {
        let path = dir.join(file.name);
        std::fs::write(&path, &file.content)
            .map_err(|err| format!("cannot write {}: {err}", path.display()))?;
        names.push(file.name.to_string());
        written.push(path);
    }
    let manifest = RunManifest {
        config_sha256,
        master_seed,
        version: env!("CARGO_PKG_VERSION"),
        unix_time_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|elapsed| elapsed.as_secs())
            .unwrap_or(0),
        outputs: names,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|err| format!("cannot serialize manifest: {err}"))?;
    std::fs::write(&path, text + "\n")
        .map_err(|err| format!("cannot write {}: {err}", path.display()))?;
    written.push(path);
    Ok(written)
}
