use crate::error::{Result, StatError};

/// A sequence of bits under test, stored one bit per byte.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSequence {
    bits: Vec<u8>,
}

impl BitSequence {
    /// Any nonzero value counts as a 1.
    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Self {
        Self {
            bits: bits.into_iter().map(|b| u8::from(b != 0)).collect(),
        }
    }

    /// Parses a string of `0` and `1` characters; whitespace is ignored.
    pub fn from_ascii(text: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for c in text.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                c if c.is_whitespace() => {}
                c => {
                    return Err(StatError::Domain(format!(
                        "unexpected character {c:?} in bit string"
                    )))
                }
            }
        }
        Ok(Self { bits })
    }

    /// First `length_bits` bits of an MSB-first packed buffer.
    pub fn from_packed(bytes: &[u8], length_bits: usize) -> Result<Self> {
        if length_bits > bytes.len() * 8 {
            return Err(StatError::Domain(format!(
                "{length_bits} bits requested from {} bytes",
                bytes.len()
            )));
        }
        let bits = (0..length_bits)
            .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1)
            .collect();
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn reversed(&self) -> Self {
        Self {
            bits: self.bits.iter().rev().copied().collect(),
        }
    }

    /// Packs MSB-first into bytes; the length must be a whole number of bytes.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if !self.bits.len().is_multiple_of(8) {
            return Err(StatError::Domain(format!(
                "{} bits is not a whole number of bytes",
                self.bits.len()
            )));
        }
        Ok(self
            .bits
            .chunks_exact(8)
            .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b))
            .collect())
    }

    /// Splits into consecutive non-overlapping sequences of `len` bits,
    /// dropping any remainder.
    pub fn split(&self, len: usize) -> Vec<BitSequence> {
        assert!(len > 0);
        self.bits
            .chunks_exact(len)
            .map(|c| BitSequence { bits: c.to_vec() })
            .collect()
    }
}
