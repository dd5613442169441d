//! Run manifest: what was run, on which input, producing which files.
//! Timestamps live here and only here, so the data files stay deterministic.

use crate::error::CliResult;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Resolved configuration echo.
    pub config: serde_json::Value,
    /// SHA-256 of the input file bytes, when a file was read.
    pub input_sha256: Option<String>,
    pub outputs: Vec<String>,
    pub version: String,
    pub timestamp_unix_s: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: serde_json::Value, input: Option<&[u8]>) -> Self {
        Self {
            subcommand: subcommand.to_owned(),
            config,
            input_sha256: input.map(|bytes| {
                let mut hasher = Sha256::new();
                hasher.update(bytes);
                format!("{:x}", hasher.finalize())
            }),
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn record(&mut self, path: &Path) {
        if let Some(name) = path.file_name() {
            self.outputs.push(name.to_string_lossy().into_owned());
        }
    }

    /// Write `manifest.json` into the output directory. Every listed output
    /// must already exist on disk.
    pub fn write(&self, out_dir: &Path) -> CliResult<()> {
        for name in &self.outputs {
            debug_assert!(out_dir.join(name).exists(), "output {name} missing");
        }
        let path = out_dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(self).expect("serializes"))?;
        Ok(())
    }
}
