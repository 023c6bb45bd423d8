//! Run manifests: every command records what it ran, with what
//! configuration and seed, and which files it read and wrote.
//!
//! Artifact names follow `<command>-<seed>-<confighash>`, where the hash
//! covers the fully resolved configuration — re-running with the same
//! flags targets the same file names, so pipelines can cache on them.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Record of one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// The fully resolved configuration, flags and defaults included.
    pub config: serde_json::Value,
    pub seed: u64,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    pub duration_ms: u64,
    /// True when the run failed partway and some outputs are missing or
    /// incomplete.
    pub partial: bool,
    pub errors: Vec<String>,
    /// Derived run information (fitted scaler parameters, summary numbers)
    /// — not part of the configuration, so it never feeds the artifact
    /// name hash.
    #[serde(default)]
    pub details: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            config,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_ms: 0,
            partial: false,
            errors: Vec::new(),
            details: serde_json::Value::Null,
        }
    }

    /// `<command>-<seed>-<confighash>` — the shared stem of this run's
    /// artifact files.
    pub fn artifact_stem(&self) -> String {
        format!("{}-{}-{}", self.command, self.seed, config_hash(&self.config))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut file, self)
            .map_err(|e| Error::InvalidInput(format!("cannot serialize manifest: {e}")))?;
        file.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: format!("invalid manifest document: {e}"),
        })
    }
}

/// First eight hex digits of the SHA-256 of the canonical (compact) JSON
/// encoding of the configuration.
pub fn config_hash(config: &serde_json::Value) -> String {
    let compact = serde_json::to_string(config).expect("JSON value always serializes");
    let digest = Sha256::digest(compact.as_bytes());
    digest[..4].iter().map(|b| format!("{b:02x}")).collect()
}
