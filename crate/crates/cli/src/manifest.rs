use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Written next to every output file as `<output>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    /// Every flag after defaults are applied.
    pub flags: Value,
    /// Input path to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub created_at: String,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(command: &str, flags: &impl Serialize, inputs: &[&Path], seed: Option<u64>) -> Result<Self> {
        let mut digests = BTreeMap::new();
        for p in inputs {
            digests.insert(p.display().to_string(), sha256_file(p)?);
        }
        Ok(RunManifest {
            command: command.to_string(),
            argv: std::env::args().skip(1).collect(),
            flags: serde_json::to_value(flags)?,
            inputs: digests,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            created_at: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        })
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes `bytes` to `output`, or stdout when no path is given. A file
/// output gets its manifest sidecar.
pub fn emit(output: Option<&Path>, bytes: &[u8], manifest: &RunManifest) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
            let side = sidecar_path(path);
            let mut json = serde_json::to_vec_pretty(manifest)?;
            json.push(b'\n');
            fs::write(&side, json).with_context(|| format!("writing {}", side.display()))?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}
