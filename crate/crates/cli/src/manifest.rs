//! Run manifests: every command writes a small JSON record next to its
//! output. Timestamps live only here, so the outputs themselves stay
//! byte-reproducible.

use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct RunManifest {
    command: String,
    argv: Vec<String>,
    seed: u64,
    parameters: Vec<(String, String)>,
    output: String,
    artifact_version: String,
    unix_time: u64,
}

pub fn write(
    output: &Path,
    command: &str,
    seed: u64,
    parameters: &[(&str, String)],
) -> planewalk::Result<()> {
    let manifest = RunManifest {
        command: command.to_string(),
        argv: std::env::args().collect(),
        seed,
        parameters: parameters
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
        output: output.display().to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        unix_time: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let path = output.with_extension(format!(
        "{}.manifest.json",
        output
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("out")
    ));
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| planewalk::Error::Format(e.to_string()))?;
    planewalk::environment::atomic_write_bytes(&path, format!("{text}\n").as_bytes())
}
