//! CSV tables with a JSON sidecar (`name.csv` -> `name.json`) holding the
//! resolved configuration and command-specific metadata.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub fn ensure_dir(dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    for r in rows {
        w.serialize(r)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    w.flush().map_err(|e| format!("{}: {e}", path.display()))
}

/// Like [`write_csv`] but with a fixed header, written even for zero rows.
/// `header` must match the serialized field order of `T`.
pub fn write_table<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), String> {
    let err = |e: csv::Error| format!("{}: {e}", path.display());
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(err)?;
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write_sidecar(
    csv: &Path,
    command: &str,
    config: &RunConfig,
    extra: Value,
) -> Result<(), String> {
    let doc = json!({
        "command": command,
        "file": csv.file_name().map(|f| f.to_string_lossy().into_owned()),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config.to_json(),
        "metadata": extra,
    });
    write_json(&sidecar_path(csv), &doc)
}

pub fn write_json(path: &Path, doc: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| e.to_string())?;
    fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))
}
