//! Discrete Fourier transform (spectral) test.

use std::f64::consts::SQRT_2;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{require_len, Result};
use crate::outcome::TestOutcome;
use crate::sequence::BitSequence;
use crate::special::erfc;

pub const MIN_LENGTH: usize = 1000;

/// Magnitudes of the first `n / 2` DFT coefficients of the +-1 sequence.
pub fn dft_magnitudes(seq: &BitSequence) -> Vec<f64> {
    let mut buffer: Vec<Complex<f64>> = seq
        .bits()
        .iter()
        .map(|&b| Complex::new(2.0 * b as f64 - 1.0, 0.0))
        .collect();
    let n = buffer.len();
    if n == 0 {
        return Vec::new();
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    buffer[..n / 2].iter().map(|c| c.norm()).collect()
}

pub fn dft_spectral(seq: &BitSequence) -> Result<TestOutcome> {
    let n = seq.len();
    require_len("fft", MIN_LENGTH, n)?;
    let nf = n as f64;
    let threshold = (nf * (1.0f64 / 0.05).ln()).sqrt();
    let expected = 0.95 * nf / 2.0;
    let below = dft_magnitudes(seq)
        .iter()
        .filter(|&&m| m < threshold)
        .count() as f64;
    let d = (below - expected) / (nf * 0.95 * 0.05 / 4.0).sqrt();
    Ok(TestOutcome::new("fft", d, vec![erfc(d.abs() / SQRT_2)]))
}
