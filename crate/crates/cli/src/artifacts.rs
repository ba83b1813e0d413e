//! Output directory bookkeeping and `manifest.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cache::sha256_hex;
use crate::error::{CliError, Result};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ArtifactRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Collects the files written for one experiment.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    records: Vec<ArtifactRecord>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'a str,
    config_hash: &'a str,
    config: &'a BTreeMap<String, String>,
    seed: u64,
    artifacts: &'a [ArtifactRecord],
    warnings: &'a [String],
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self {
            root,
            records: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn records(&self) -> &[ArtifactRecord] {
        &self.records
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.records.retain(|r| r.file != name);
        self.records.push(ArtifactRecord {
            file: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// One compact JSON object per line.
    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<PathBuf> {
        let mut text = String::new();
        for r in rows {
            text.push_str(&serde_json::to_string(r)?);
            text.push('\n');
        }
        self.write(name, text.as_bytes())
    }

    /// Writes `manifest.json`. Deliberately free of timestamps and cache
    /// state so reruns are byte-identical.
    pub fn finish(
        &mut self,
        experiment: &str,
        config_hash: &str,
        config: &BTreeMap<String, String>,
        seed: u64,
        warnings: &[String],
    ) -> Result<PathBuf> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            experiment,
            config_hash,
            config,
            seed,
            artifacts: &self.records,
            warnings,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.root.join("manifest.json");
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
