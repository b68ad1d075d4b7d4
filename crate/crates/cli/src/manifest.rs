use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Reproducibility record written next to every trained model.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub toolkit_version: String,
    pub argv: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub inputs: Vec<InputDigest>,
    pub output: String,
    pub output_format: String,
    pub seed: u64,
    /// Omitted in deterministic (single-worker) mode so reruns are
    /// byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn digest_file(path: &Path) -> io::Result<InputDigest> {
    let mut hasher = Sha256::new();
    let mut file = File::open(path)?;
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(hasher.finalize()),
    })
}

/// `<model path>.manifest.json`
pub fn manifest_path(model: &Path) -> std::path::PathBuf {
    let mut name = model.as_os_str().to_owned();
    name.push(".manifest.json");
    name.into()
}
