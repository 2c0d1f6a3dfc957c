//! Run manifests: the resolved inputs of a command, enough to rerun it and
//! get byte-identical outputs.

use std::path::{Path, PathBuf};

use puf_trng_core::GeneratorConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::{Battery, PufNewArgs};
use crate::error::{CliError, CliResult};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
    pub run: RunInputs,
    pub outputs: Vec<OutputFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunInputs {
    PufNew(PufNewArgs),
    Generate(GenerateInputs),
    Test(TestInputs),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerateInputs {
    pub instance: PathBuf,
    pub instance_sha256: String,
    pub config: GeneratorConfig,
    pub bits: u64,
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestInputs {
    pub input: PathBuf,
    pub input_sha256: String,
    pub battery: Battery,
    pub bits_exact: Option<u64>,
    pub sequence_length: Option<usize>,
    pub sequences: Option<usize>,
    pub alpha: f64,
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub sha256: String,
}

impl RunManifest {
    pub fn new(run: RunInputs, started_at: String, outputs: &[&Path]) -> CliResult<Self> {
        let outputs = outputs
            .iter()
            .map(|p| {
                Ok(OutputFile {
                    path: p.to_path_buf(),
                    sha256: file_sha256(p)?,
                })
            })
            .collect::<CliResult<_>>()?;
        Ok(Self {
            manifest_version: MANIFEST_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_at,
            finished_at: now(),
            run,
            outputs,
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let manifest: Self = serde_json::from_str(&text).map_err(|e| CliError::io(path, e))?;
        if manifest.manifest_version != MANIFEST_VERSION {
            return Err(CliError::io(
                path,
                format!("unsupported manifest version {}", manifest.manifest_version),
            ));
        }
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        write_json(path, self)
    }
}

/// `<output>.manifest.json`
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn now() -> String {
    humantime::format_rfc3339_seconds(std::time::SystemTime::now()).to_string()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
