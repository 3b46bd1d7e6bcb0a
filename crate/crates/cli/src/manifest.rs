//! Run manifests and staged output files.
//!
//! Commands render every output in memory first. Only after the whole
//! computation succeeded are the files written, each through an atomic
//! rename and each followed by a `<file>.manifest.json` describing the run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mgsp::io::{json_text, write_atomic};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<String>,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
}

/// Outputs and bookkeeping collected while a command runs.
#[derive(Debug, Default)]
pub struct Staged {
    inputs: Vec<String>,
    params: BTreeMap<String, Value>,
    seed: Option<u64>,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Staged {
    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.params.insert(key.to_string(), v);
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn file(&mut self, path: &Path, text: String) {
        self.files.push((path.to_path_buf(), text.into_bytes()));
    }

    pub fn manifest_path(path: &Path) -> PathBuf {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        path.with_file_name(name)
    }

    /// Write all staged files, each paired with the run manifest.
    pub fn commit(self, subcommand: &str) -> mgsp::Result<Vec<PathBuf>> {
        let manifest = RunManifest {
            subcommand: subcommand.to_string(),
            inputs: self.inputs,
            params: self.params,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.files.iter().map(|(p, _)| p.display().to_string()).collect(),
        };
        let manifest_text = json_text(&manifest)?;
        let mut written = Vec::with_capacity(self.files.len());
        for (path, bytes) in &self.files {
            write_atomic(path, bytes)?;
            write_atomic(&Self::manifest_path(path), manifest_text.as_bytes())?;
            written.push(path.clone());
        }
        Ok(written)
    }
}
