//! Sidecar JSON describing how an output file was produced.

use std::fs::{self, File};
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: &impl Serialize) -> CliResult<Self> {
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            inputs: Vec::new(),
            outputs: Vec::new(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        })
    }

    pub fn input(&mut self, path: &Path) -> CliResult<()> {
        self.inputs.push(digest(path)?);
        Ok(())
    }

    /// Records `output` and writes the manifest next to it as
    /// `<output>.manifest.json`.
    pub fn write_for(&self, output: &Path) -> CliResult<PathBuf> {
        let mut m = self.clone();
        m.outputs = vec![digest(output)?];
        let path = manifest_path(output);
        let json = serde_json::to_string_pretty(&m)?;
        fs::write(&path, json + "\n").map_err(|e| sedrec::Error::io(&path, e))?;
        Ok(path)
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// SHA-256 of a file, or of every file below a directory (relative paths
/// and contents, in sorted order).
pub fn digest(path: &Path) -> CliResult<FileDigest> {
    let mut hasher = Sha256::new();
    let wrap = |e: io::Error| sedrec::Error::io(path, e);
    if path.is_dir() {
        let mut files = Vec::new();
        collect_files(path, &mut files).map_err(wrap)?;
        files.sort();
        for f in files {
            let rel = f.strip_prefix(path).unwrap_or(&f);
            hasher.update(rel.to_string_lossy().as_bytes());
            hasher.update([0]);
            hash_file(&f, &mut hasher).map_err(|e| sedrec::Error::io(&f, e))?;
        }
    } else {
        hash_file(path, &mut hasher).map_err(wrap)?;
    }
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: format!("{:x}", hasher.finalize()),
    })
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let p = entry?.path();
        if p.is_dir() {
            collect_files(&p, out)?;
        } else {
            out.push(p);
        }
    }
    Ok(())
}

fn hash_file(path: &Path, hasher: &mut Sha256) -> io::Result<()> {
    let mut file = File::open(path)?;
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            return Ok(());
        }
        hasher.update(&buf[..n]);
    }
}
