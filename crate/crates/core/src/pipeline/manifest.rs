use std::io::Read;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RunConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Provenance of a run directory: everything needed to repeat it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    /// Split seed of each fold, derived from `config.seed`.
    pub fold_seeds: Vec<u64>,
    pub inputs: Vec<InputDigest>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Digests of every input file of `config`, snapshot directories expanded
/// to their files in name order.
pub fn digest_inputs(config: &RunConfig) -> Result<Vec<InputDigest>> {
    let mut paths: Vec<PathBuf> = config.data.inputs().into_iter().map(Path::to_path_buf).collect();
    if let Some(dir) = &config.data.snapshots {
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        paths.extend(files);
    }
    paths
        .into_iter()
        .map(|path| {
            let sha256 = sha256_file(&path)?;
            Ok(InputDigest { path, sha256 })
        })
        .collect()
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    /// Reads a manifest from a file or from a run directory.
    pub fn read(path: &Path) -> Result<Self> {
        let file = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
        if !file.exists() {
            return Err(Error::MissingInput(file));
        }
        let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", file.display())))
    }

    /// Fails if any recorded input is gone or has different contents.
    pub fn verify_inputs(&self) -> Result<()> {
        if self.version != crate::VERSION {
            warn!(
                "manifest was written by version {}, running {}",
                self.version,
                crate::VERSION
            );
        }
        for input in &self.inputs {
            if !input.path.exists() {
                return Err(Error::MissingInput(input.path.clone()));
            }
            let found = sha256_file(&input.path)?;
            if found != input.sha256 {
                return Err(Error::DigestMismatch {
                    path: input.path.clone(),
                    expected: input.sha256.clone(),
                    found,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x");
        std::fs::write(&p, "abc").unwrap();
        assert_eq!(
            sha256_file(&p).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
