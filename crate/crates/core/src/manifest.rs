//! Run manifests: input and output digests, resolved configuration and
//! timing, written next to each output file.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_NAME: &str = "ontomatch";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    pub duration_ms: u64,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: command.to_owned(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: None,
            duration_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `out.xml` gets `out.xml.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
