//! On-disk stream format.
//!
//! Streams are raw bytes with bits packed MSB-first: the first generated bit
//! is the most significant bit of byte 0 and a trailing partial byte is
//! zero-padded. The true length and the generating configuration live in a
//! JSON sidecar next to the data file (`<data>.json`).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{BitStream, GenerationStats, GeneratorConfig};

pub const METADATA_FORMAT_VERSION: u32 = 1;

/// Appends bits MSB-first into a byte buffer.
#[derive(Clone, Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len_bits: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity_bits(bits: u64) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8) as usize),
            len_bits: 0,
        }
    }

    pub fn push(&mut self, bit: bool) {
        let offset = self.len_bits % 8;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().expect("byte pushed above") |= 0x80 >> offset;
        }
        self.len_bits += 1;
    }

    pub fn len_bits(&self) -> u64 {
        self.len_bits
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// Packs 0/1 values MSB-first.
pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut writer = BitWriter::with_capacity_bits(bits.len() as u64);
    for &b in bits {
        writer.push(b != 0);
    }
    writer.into_bytes()
}

/// Unpacks the first `length_bits` bits of an MSB-first buffer.
pub fn unpack_bits(bytes: &[u8], length_bits: u64) -> Result<Vec<u8>> {
    if length_bits > bytes.len() as u64 * 8 {
        return Err(Error::Format(format!(
            "{length_bits} bits requested from {} bytes",
            bytes.len()
        )));
    }
    Ok((0..length_bits)
        .map(|i| (bytes[(i / 8) as usize] >> (7 - i % 8)) & 1)
        .collect())
}

/// Sidecar document describing a stream file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamMetadata {
    pub format_version: u32,
    pub length_bits: u64,
    pub config_digest: String,
    pub config: GeneratorConfig,
    pub stats: GenerationStats,
}

impl StreamMetadata {
    pub fn for_stream(config: &GeneratorConfig, stream: &BitStream) -> Self {
        Self {
            format_version: METADATA_FORMAT_VERSION,
            length_bits: stream.length_bits,
            config_digest: config.digest(),
            config: config.clone(),
            stats: stream.stats,
        }
    }
}

/// Where the sidecar for `data` lives.
pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut name = data.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Writes the data file and its sidecar.
pub fn write_stream(data: &Path, config: &GeneratorConfig, stream: &BitStream) -> Result<()> {
    std::fs::write(data, &stream.bytes)?;
    let meta = StreamMetadata::for_stream(config, stream);
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    std::fs::write(sidecar_path(data), text)?;
    Ok(())
}

pub fn read_metadata(path: &Path) -> Result<StreamMetadata> {
    let meta: StreamMetadata = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if meta.format_version != METADATA_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported stream metadata version {}",
            meta.format_version
        )));
    }
    Ok(meta)
}

/// Reads a stream file and, when present, its sidecar. Returns the packed
/// bytes and the true bit length.
pub fn read_stream(data: &Path) -> Result<(Vec<u8>, u64, Option<StreamMetadata>)> {
    let bytes = std::fs::read(data)?;
    let sidecar = sidecar_path(data);
    if sidecar.exists() {
        let meta = read_metadata(&sidecar)?;
        if meta.length_bits.div_ceil(8) != bytes.len() as u64 {
            return Err(Error::Format(format!(
                "sidecar claims {} bits but data file has {} bytes",
                meta.length_bits,
                bytes.len()
            )));
        }
        let len = meta.length_bits;
        Ok((bytes, len, Some(meta)))
    } else {
        let len = bytes.len() as u64 * 8;
        Ok((bytes, len, None))
    }
}
