//! Atomic file output and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

/// Write `path` through a temporary file in the same directory, so readers
/// see either the old contents or the new ones.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("writing into {}", dir.display()))?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).with_context(|| format!("replacing {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}

/// Provenance record written next to a command's outputs.
///
/// Everything except `run` is a pure function of the inputs and settings;
/// `run` holds the wall-clock timestamp.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub settings: serde_json::Value,
    /// Input path to sha256.
    pub inputs: BTreeMap<String, String>,
    /// Output path, relative to the output directory, to sha256.
    pub outputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    pub run: RunInfo,
}

#[derive(Debug, Serialize)]
pub struct RunInfo {
    pub unix_time_seconds: u64,
}

pub struct ManifestBuilder {
    root: PathBuf,
    manifest: Manifest,
}

impl ManifestBuilder {
    pub fn new(command: &str, root: &Path, settings: impl Serialize) -> Result<Self> {
        Ok(Self {
            root: root.to_path_buf(),
            manifest: Manifest {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                settings: serde_json::to_value(settings)?,
                inputs: BTreeMap::new(),
                outputs: BTreeMap::new(),
                details: serde_json::Value::Null,
                run: RunInfo { unix_time_seconds: 0 },
            },
        })
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.manifest.inputs.insert(path.display().to_string(), file_digest(path)?);
        Ok(())
    }

    /// Record an output that has already been written under the root.
    pub fn output(&mut self, path: &Path) -> Result<()> {
        let rel = path.strip_prefix(&self.root).unwrap_or(path);
        // Forward slashes keep manifests identical across platforms.
        let key = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        self.manifest.outputs.insert(key, file_digest(path)?);
        Ok(())
    }

    pub fn details(&mut self, details: impl Serialize) -> Result<()> {
        self.manifest.details = serde_json::to_value(details)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.manifest.run.unix_time_seconds =
            SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let path = self.root.join(format!("{}.manifest.json", self.manifest.command));
        write_json(&path, &self.manifest)?;
        Ok(path)
    }
}
