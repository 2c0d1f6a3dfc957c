//! Frequency (monobit) and frequency-within-a-block tests.

use std::f64::consts::SQRT_2;

use crate::error::{require_len, Result, StatError};
use crate::outcome::TestOutcome;
use crate::sequence::BitSequence;
use crate::special::{erfc, igamc};

pub fn frequency_monobit(seq: &BitSequence) -> Result<TestOutcome> {
    let n = seq.len();
    require_len("frequency", 1, n)?;
    let sum = 2 * seq.ones() as i64 - n as i64;
    let s_obs = sum.unsigned_abs() as f64 / (n as f64).sqrt();
    Ok(TestOutcome::new(
        "frequency",
        s_obs,
        vec![erfc(s_obs / SQRT_2)],
    ))
}

/// Chi-square over the proportion of ones in each `block_len`-bit block.
pub fn block_frequency(seq: &BitSequence, block_len: usize) -> Result<TestOutcome> {
    if block_len == 0 {
        return Err(StatError::Parameter {
            test: "block_frequency",
            reason: "block length must be positive".into(),
        });
    }
    require_len("block_frequency", block_len, seq.len())?;
    let blocks = seq.len() / block_len;
    let chi_sq = 4.0
        * block_len as f64
        * seq
            .bits()
            .chunks_exact(block_len)
            .map(|block| {
                let pi = block.iter().map(|&b| b as usize).sum::<usize>() as f64 / block_len as f64;
                (pi - 0.5).powi(2)
            })
            .sum::<f64>();
    let p = igamc(blocks as f64 / 2.0, chi_sq / 2.0)?;
    Ok(TestOutcome::new("block_frequency", chi_sq, vec![p]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> BitSequence {
        BitSequence::from_ascii(s).unwrap()
    }

    #[test]
    fn monobit_known_answer() {
        // S = 6 - 4 = 2, p = erfc(2 / sqrt(20))
        let oracle = statrs::function::erf::erfc(2.0 / 20f64.sqrt());
        let out = frequency_monobit(&seq("1011010101")).unwrap();
        assert!((out.p_value() - oracle).abs() < 1e-9);
        assert!((out.p_value() - 0.527_089).abs() < 1e-6);
    }

    #[test]
    fn monobit_extremes() {
        let zeros = BitSequence::from_bits(vec![0; 100]);
        let out = frequency_monobit(&zeros).unwrap();
        assert!(out.p_value() < 1e-20);
        assert!(!out.pass);
        let alt = BitSequence::from_bits((0..100).map(|i| (i % 2) as u8));
        assert_eq!(frequency_monobit(&alt).unwrap().p_value(), 1.0);
        assert!(frequency_monobit(&BitSequence::from_bits(vec![])).is_err());
    }

    #[test]
    fn block_frequency_known_answer() {
        // blocks 011, 001, 101 -> proportions 2/3, 1/3, 2/3, chi^2 = 12 * 3 * (1/6)^2 = 1
        let out = block_frequency(&seq("0110011010"), 3).unwrap();
        assert!((out.statistic - 1.0).abs() < 1e-12);
        assert!((out.p_value() - 0.801_252).abs() < 1e-6);
    }

    #[test]
    fn block_frequency_extremes() {
        let ones = BitSequence::from_bits(vec![1; 1280]);
        assert!(block_frequency(&ones, 128).unwrap().p_value() < 1e-10);
        let alt = BitSequence::from_bits((0..128).map(|i| (i % 2) as u8));
        let out = block_frequency(&alt, 128).unwrap();
        assert_eq!(out.statistic, 0.0);
        assert_eq!(out.p_value(), 1.0);
        assert!(block_frequency(&alt, 0).is_err());
        assert!(block_frequency(&alt, 129).is_err());
    }
}
