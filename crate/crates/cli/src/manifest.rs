use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to replay a run, plus checksums of what it wrote.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema: u32,
    pub command: String,
    #[serde(default)]
    pub config: Option<PathBuf>,
    /// Positional input: codebook file for `profile`, name for `baselines`.
    #[serde(default)]
    pub input: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub linear: bool,
    pub out: PathBuf,
    /// File name in `out` to lowercase hex SHA-256.
    pub artifacts: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn write(out: &Path, manifest: &RunManifest) -> CliResult<PathBuf> {
    let path = out.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(manifest).map_err(CliError::runtime)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub fn read(path: &Path) -> CliResult<RunManifest> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
