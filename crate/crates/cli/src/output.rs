//! Output files and the run manifest.
//!
//! Every file is written to a temporary sibling and renamed into place, so a
//! reader never sees a partial file. The manifest is written last; its
//! presence marks a completed run.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hypersaw::{Error, Result, SawParams};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: SawParams,
    /// Output file names, relative to the output directory.
    pub outputs: Vec<String>,
    pub wall_clock: f64,
    pub tool_version: String,
    /// SHA-256 of the resolved configuration, hex encoded.
    pub config_sha256: String,
    pub config: serde_json::Value,
    /// Command-specific diagnostics that are not part of the data outputs.
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub diagnostics: serde_json::Value,
}

/// Collects the files of one run and writes its manifest.
pub struct Run {
    command: String,
    dir: PathBuf,
    outputs: Vec<String>,
    started: Instant,
}

impl Run {
    pub fn start(command: &str, dir: &Path) -> Result<Run> {
        fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Run {
            command: command.to_owned(),
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        if name == MANIFEST || self.outputs.iter().any(|o| o == name) {
            return Err(Error::Usage(format!("output {name} written twice")));
        }
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.outputs.push(name.to_owned());
        Ok(path)
    }

    pub fn finish<C: Serialize>(self, params: &SawParams, config: &C, diagnostics: serde_json::Value) -> Result<PathBuf> {
        let config = serde_json::to_value(config)?;
        let canonical = serde_json::to_vec(&config)?;
        let manifest = RunManifest {
            command: self.command,
            params: params.clone(),
            outputs: self.outputs,
            wall_clock: self.started.elapsed().as_secs_f64(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            config_sha256: hex::encode(Sha256::digest(&canonical)),
            config,
            diagnostics,
        };
        let path = self.dir.join(MANIFEST);
        write_atomic(&path, &to_json(&manifest)?)?;
        Ok(path)
    }
}
