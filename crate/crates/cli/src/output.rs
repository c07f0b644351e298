//! Run outputs. Files are written into one directory and listed, with their
//! SHA-256, in `manifest.json`. If the run fails before the manifest is
//! written, everything it wrote is removed again.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileRecord {
    fn of(path: String, bytes: &[u8]) -> Self {
        Self {
            path,
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub arguments: Vec<String>,
    pub seed: u64,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
}

pub struct OutputDir {
    dir: PathBuf,
    created: bool,
    inputs: Vec<FileRecord>,
    written: Vec<FileRecord>,
    finished: bool,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        let created = !dir.exists();
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            created,
            inputs: Vec::new(),
            written: Vec::new(),
            finished: false,
        })
    }

    /// Records an input file's checksum for the manifest.
    pub fn note_input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.push(FileRecord::of(path.display().to_string(), &bytes));
        Ok(())
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        // Record first so a half-written file is still cleaned up.
        self.written.push(FileRecord::of(name.to_string(), bytes));
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))
    }

    pub fn finish(mut self, command: &str, seed: u64) -> Result<PathBuf> {
        let manifest = Manifest {
            tool: "gse",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            seed,
            inputs: std::mem::take(&mut self.inputs),
            outputs: self.written.clone(),
        };
        let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        json.push(b'\n');
        let path = self.dir.join(MANIFEST);
        fs::write(&path, json).map_err(|e| CliError::io(&path, e))?;
        self.finished = true;
        Ok(path)
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        if self.finished {
            return;
        }
        for f in &self.written {
            let _ = fs::remove_file(self.dir.join(&f.path));
        }
        if self.created {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unfinished_runs_leave_nothing_behind() {
        let root = tempfile::tempdir().unwrap();
        let dir = root.path().join("run");
        {
            let mut out = OutputDir::create(&dir).unwrap();
            out.write("a.csv", b"x\n1\n").unwrap();
            assert!(dir.join("a.csv").exists());
        }
        assert!(!dir.exists());
    }

    #[test]
    fn manifest_checksums_match_files() {
        let root = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(root.path()).unwrap();
        out.write("a.csv", b"x\n1\n").unwrap();
        let manifest = out.finish("test", 7).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&fs::read(manifest).unwrap()).unwrap();
        let rec = &v["outputs"][0];
        let bytes = fs::read(root.path().join(rec["path"].as_str().unwrap())).unwrap();
        assert_eq!(rec["sha256"].as_str().unwrap(), sha256_hex(&bytes));
        assert_eq!(v["seed"], 7);
    }
}
