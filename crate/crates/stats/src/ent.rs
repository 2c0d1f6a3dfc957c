//! Byte-level randomness metrics in the style of the `ent` utility.

use serde::{Deserialize, Serialize};

use crate::error::{require_len, Result};
use crate::special::igamc;

/// Bytes per Monte Carlo point: two 24-bit coordinates.
const MONTE_CARLO_BYTES: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntReport {
    pub bytes: u64,
    pub entropy_bits_per_byte: f64,
    pub optimum_compression_pct: f64,
    pub chi_square: f64,
    /// Percentage of the time a truly random stream would exceed `chi_square`.
    pub chi_square_exceed_pct: f64,
    pub mean: f64,
    pub monte_carlo_pi: f64,
    pub monte_carlo_error_pct: f64,
    pub serial_correlation: f64,
    /// Set when the byte values have zero variance and the serial correlation
    /// is undefined; it is then reported as 1.0.
    pub serial_correlation_degenerate: bool,
}

pub fn ent_metrics(bytes: &[u8]) -> Result<EntReport> {
    require_len("ent", MONTE_CARLO_BYTES, bytes.len())?;
    let n = bytes.len() as f64;

    let mut histogram = [0u64; 256];
    for &b in bytes {
        histogram[b as usize] += 1;
    }

    let entropy: f64 = histogram
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    let entropy = entropy.clamp(0.0, 8.0);
    let compression = ((8.0 - entropy) / 8.0 * 100.0).round();

    let expected = n / 256.0;
    let chi_square: f64 = histogram
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let chi_square_exceed_pct = igamc(255.0 / 2.0, chi_square / 2.0)? * 100.0;

    let mean = bytes.iter().map(|&b| b as u64).sum::<u64>() as f64 / n;

    let scale = (1u64 << 24) as f64;
    let (mut inside, mut points) = (0u64, 0u64);
    for point in bytes.chunks_exact(MONTE_CARLO_BYTES) {
        let coord = |c: &[u8]| c.iter().fold(0u32, |acc, &b| (acc << 8) | b as u32) as f64 / scale;
        let (x, y) = (coord(&point[..3]), coord(&point[3..]));
        points += 1;
        if x * x + y * y < 1.0 {
            inside += 1;
        }
    }
    let monte_carlo_pi = 4.0 * inside as f64 / points as f64;
    let monte_carlo_error_pct =
        (monte_carlo_pi - std::f64::consts::PI).abs() / std::f64::consts::PI * 100.0;

    let (serial_correlation, degenerate) = serial_correlation(bytes);

    Ok(EntReport {
        bytes: bytes.len() as u64,
        entropy_bits_per_byte: entropy,
        optimum_compression_pct: compression,
        chi_square,
        chi_square_exceed_pct,
        mean,
        monte_carlo_pi,
        monte_carlo_error_pct,
        serial_correlation,
        serial_correlation_degenerate: degenerate,
    })
}

/// Lag-1 correlation of consecutive bytes, wrapping the last byte around to
/// the first.
fn serial_correlation(bytes: &[u8]) -> (f64, bool) {
    let n = bytes.len() as f64;
    let (mut sum, mut sum_sq, mut cross) = (0.0, 0.0, 0.0);
    for (i, &b) in bytes.iter().enumerate() {
        let x = b as f64;
        let next = bytes[(i + 1) % bytes.len()] as f64;
        sum += x;
        sum_sq += x * x;
        cross += x * next;
    }
    let denom = n * sum_sq - sum * sum;
    if denom == 0.0 {
        return (1.0, true);
    }
    (((n * cross - sum * sum) / denom).clamp(-1.0, 1.0), false)
}
