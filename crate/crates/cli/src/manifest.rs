//! Run manifests emitted beside every output file.

use anyhow::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub wall_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn digest_file(path: &Path) -> Result<InputDigest> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: format!("{:x}", hasher.finalize()),
    })
}

pub fn write_manifest(out_path: &Path, manifest: &RunManifest) -> Result<()> {
    let manifest_path = out_path.with_extension(format!(
        "{}manifest.json",
        out_path
            .extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    let text = serde_json::to_string_pretty(manifest)? + "\n";
    std::fs::write(manifest_path, text)?;
    Ok(())
}
