//! Report envelope and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub inputs: Vec<String>,
    pub config: String,
    pub tol: f64,
    pub seed: u64,
    pub version: &'static str,
    pub elapsed_ms: u128,
}

impl RunManifest {
    pub fn new(command: &'static str, inputs: &[PathBuf], config: String, tol: f64, seed: u64, started: Instant) -> Self {
        RunManifest {
            command,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            config,
            tol,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            elapsed_ms: started.elapsed().as_millis(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub schema: u32,
    pub manifest: RunManifest,
    pub result: Value,
}

impl Envelope {
    pub fn new(manifest: RunManifest, result: Value) -> Self {
        Envelope { schema: 1, manifest, result }
    }
}

/// Write to a temporary file in the target directory, then rename over the target.
pub fn write_atomic(path: &Path, text: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.write_all(b"\n")?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)?;
    Ok(())
}
