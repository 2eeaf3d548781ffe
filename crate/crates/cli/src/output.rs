//! Atomic artifact emission and the per-run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use whitney_lab::io::write_atomic;

use crate::config::RunConfig;
use crate::CliError;

pub const CONFIG_FILE: &str = "config.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub command: String,
    pub seed: u64,
    /// SHA-256 of the emitted `config.json`.
    pub config_hash: String,
    pub files: Vec<FileEntry>,
    pub wall_time_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects every file a run writes so the manifest can list it.
pub struct Emitter {
    dir: PathBuf,
    files: Vec<FileEntry>,
    started: Instant,
}

impl Emitter {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new(), started: Instant::now() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.files.retain(|f| f.name != name);
        self.files.push(FileEntry { name: name.into(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Registers a file written by a library routine.
    pub fn record(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let name = path.strip_prefix(&self.dir).unwrap_or(path).to_string_lossy().into_owned();
        self.files.retain(|f| f.name != name);
        self.files.push(FileEntry { name, sha256: sha256_hex(&bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn finish(mut self, config: &RunConfig) -> Result<Manifest, CliError> {
        let echo = format!("{}\n", config.echo_json());
        self.write(CONFIG_FILE, echo.as_bytes())?;
        self.files.sort_by(|a, b| a.name.cmp(&b.name));
        let manifest = Manifest {
            command: config.command.clone(),
            seed: config.seed,
            config_hash: sha256_hex(echo.as_bytes()),
            files: self.files.clone(),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join(MANIFEST_FILE);
        write_atomic(&path, text.as_bytes()).map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}
