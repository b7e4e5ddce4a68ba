//! File outputs: data payloads and the run manifest.

use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use crate::AppError;

pub fn write_text(path: &Path, content: &str) -> Result<(), AppError> {
    std::fs::write(path, content)
        .map_err(|e| AppError::io(format!("cannot write {}: {e}", path.display())))
}

/// Every run writes `<out>.manifest.json` echoing the fully resolved
/// configuration, the seed, and the produced files, so the run can be
/// reproduced from the manifest alone.
pub fn write_manifest(
    out: &Path,
    command: &str,
    seed: Option<u64>,
    config: Value,
    outputs: &[&Path],
    notes: Value,
) -> Result<PathBuf, AppError> {
    let path = manifest_path(out);
    let manifest = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": config,
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "notes": notes,
    });
    write_text(&path, &format!("{:#}\n", manifest))?;
    Ok(path)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Formats one CSV field; `None` becomes an empty field.
pub fn csv_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn pretty_json(v: &Value) -> String {
    format!("{:#}\n", v)
}
