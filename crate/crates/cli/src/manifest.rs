//! Output plumbing shared by every subcommand: content hashing, atomic
//! writes, and the run-manifest JSON emitted beside each output file.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Writes via a temp file in the target directory plus rename, so a failed
/// run never leaves a partial output behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Accumulates the reproducibility record of one subcommand invocation.
pub struct RunContext {
    started: Instant,
    subcommand: &'static str,
    config: serde_json::Value,
    inputs: Vec<(PathBuf, String)>,
}

impl RunContext {
    pub fn new(subcommand: &'static str, config: serde_json::Value) -> RunContext {
        RunContext {
            started: Instant::now(),
            subcommand,
            config,
            inputs: Vec::new(),
        }
    }

    /// Reads an input file, remembering its content hash for the manifest.
    pub fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let content = read_file(path)?;
        self.inputs
            .push((path.to_path_buf(), sha256_hex(content.as_bytes())));
        Ok(content)
    }

    /// Atomically writes an output file and its `<output>.manifest.json`.
    pub fn write_output(&self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(path, bytes)?;
        let inputs: Vec<serde_json::Value> = self
            .inputs
            .iter()
            .map(|(p, h)| serde_json::json!({ "path": p.display().to_string(), "sha256": h }))
            .collect();
        let manifest = serde_json::json!({
            "tool": "offmask",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": self.subcommand,
            "config": self.config,
            "inputs": inputs,
            "output": {
                "path": path.display().to_string(),
                "sha256": sha256_hex(bytes),
            },
            "wall_time_s": self.started.elapsed().as_secs_f64(),
        });
        let manifest_path = PathBuf::from(format!("{}.manifest.json", path.display()));
        let rendered = format!("{}\n", serde_json::to_string_pretty(&manifest).expect("json"));
        write_atomic(&manifest_path, rendered.as_bytes())
    }
}
