//! Cumulative sums test, forward and reverse.

use crate::error::{require_len, Result};
use crate::outcome::TestOutcome;
use crate::sequence::BitSequence;
use crate::special::normal_cdf;

/// Largest absolute partial sum of the +-1 walk.
pub fn max_excursion(bits: impl Iterator<Item = u8>) -> u64 {
    let mut sum = 0i64;
    let mut z = 0u64;
    for b in bits {
        sum += if b == 1 { 1 } else { -1 };
        z = z.max(sum.unsigned_abs());
    }
    z
}

/// P-value for a maximum excursion `z` over `n` steps.
///
/// Summation limits use integer division truncating toward zero, as the
/// reference implementation does.
pub fn excursion_p_value(n: u64, z: u64) -> f64 {
    if z == 0 {
        return 1.0;
    }
    let (n, z) = (n as i64, z as i64);
    let root_n = (n as f64).sqrt();
    let zf = z as f64;
    let term = |k: i64, hi: i64, lo: i64| {
        normal_cdf((4 * k + hi) as f64 * zf / root_n)
            - normal_cdf((4 * k + lo) as f64 * zf / root_n)
    };
    let upper = (n / z - 1) / 4;
    let first: f64 = (((-n / z) + 1) / 4..=upper).map(|k| term(k, 1, -1)).sum();
    let second: f64 = (((-n / z) - 3) / 4..=upper).map(|k| term(k, 3, 1)).sum();
    (1.0 - first + second).clamp(0.0, 1.0)
}

/// Returns p-values `[forward, reverse]`; the statistic is the forward `z`.
pub fn cumulative_sums(seq: &BitSequence) -> Result<TestOutcome> {
    let n = seq.len();
    require_len("cumulative_sums", 1, n)?;
    let forward = max_excursion(seq.bits().iter().copied());
    let reverse = max_excursion(seq.bits().iter().rev().copied());
    let n = n as u64;
    Ok(TestOutcome::new(
        "cumulative_sums",
        forward as f64,
        vec![excursion_p_value(n, forward), excursion_p_value(n, reverse)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_answer() {
        let s = BitSequence::from_ascii("1011010111").unwrap();
        let out = cumulative_sums(&s).unwrap();
        assert_eq!(out.statistic, 4.0);
        assert!((out.p_values[0] - 0.411_658_8).abs() < 1e-6);
    }

    #[test]
    fn maximal_drift() {
        let ones = BitSequence::from_bits(vec![1; 100]);
        let out = cumulative_sums(&ones).unwrap();
        assert_eq!(out.statistic, 100.0);
        assert!(out.p_values.iter().all(|&p| p < 1e-10));
    }

    #[test]
    fn reversal_swaps_directions() {
        let s = BitSequence::from_ascii("1100100100001111110110101010001000100001011010001100001000110100110001001100011001100010100010111000").unwrap();
        let fwd = cumulative_sums(&s).unwrap();
        let rev = cumulative_sums(&s.reversed()).unwrap();
        assert_eq!(fwd.p_values[1], rev.p_values[0]);
        assert_eq!(fwd.p_values[0], rev.p_values[1]);
        assert!((fwd.p_values[0] - 0.219_194).abs() < 1e-6);
        assert!((fwd.p_values[1] - 0.114_866).abs() < 1e-6);
    }
}
