//! Approximate entropy and serial tests, both built on cyclic overlapping
//! pattern counts.

use crate::error::{Result, StatError};
use crate::outcome::TestOutcome;
use crate::sequence::BitSequence;
use crate::special::igamc;

/// Largest pattern width the counters support.
pub const MAX_PATTERN_BITS: usize = 24;

/// Counts of every `m`-bit pattern over the `n` cyclic windows of the
/// sequence, indexed by the pattern read MSB-first.
pub fn cyclic_pattern_counts(bits: &[u8], m: usize) -> Vec<u64> {
    assert!(m <= MAX_PATTERN_BITS);
    let mut counts = vec![0u64; 1 << m];
    let n = bits.len();
    if m == 0 {
        counts[0] = n as u64;
        return counts;
    }
    if n == 0 {
        return counts;
    }
    let mask = (1usize << m) - 1;
    let mut window = 0usize;
    for i in 0..m - 1 {
        window = (window << 1) | bits[i % n] as usize;
    }
    for i in 0..n {
        window = ((window << 1) | bits[(i + m - 1) % n] as usize) & mask;
        counts[window] += 1;
    }
    counts
}

fn check_order(test: &'static str, m: usize, n: usize) -> Result<()> {
    if m == 0 || m + 1 > MAX_PATTERN_BITS {
        return Err(StatError::Parameter {
            test,
            reason: format!(
                "pattern length must be in 1..={}, got {m}",
                MAX_PATTERN_BITS - 1
            ),
        });
    }
    if n <= m {
        return Err(StatError::Length {
            test,
            required: m + 1,
            actual: n,
        });
    }
    Ok(())
}

fn phi(bits: &[u8], m: usize) -> f64 {
    let n = bits.len() as f64;
    cyclic_pattern_counts(bits, m)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum()
}

/// The statistic is `ApEn(m)`.
pub fn approximate_entropy(seq: &BitSequence, m: usize) -> Result<TestOutcome> {
    let n = seq.len();
    check_order("approximate_entropy", m, n)?;
    let apen = phi(seq.bits(), m) - phi(seq.bits(), m + 1);
    let chi_sq = 2.0 * n as f64 * (std::f64::consts::LN_2 - apen);
    let p = igamc(2f64.powi(m as i32 - 1), chi_sq.max(0.0) / 2.0)?;
    Ok(TestOutcome::new("approximate_entropy", apen, vec![p]))
}

fn psi_sq(bits: &[u8], m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = bits.len() as f64;
    let sum_sq: f64 = cyclic_pattern_counts(bits, m)
        .iter()
        .map(|&c| (c as f64) * (c as f64))
        .sum();
    2f64.powi(m as i32) / n * sum_sq - n
}

/// Returns the two p-values for the first and second differences of
/// `psi^2`; the statistic is `psi^2_m`.
pub fn serial(seq: &BitSequence, m: usize) -> Result<TestOutcome> {
    let n = seq.len();
    check_order("serial", m, n)?;
    let bits = seq.bits();
    let psi_m = psi_sq(bits, m);
    let psi_m1 = psi_sq(bits, m - 1);
    let psi_m2 = if m >= 2 { psi_sq(bits, m - 2) } else { 0.0 };
    let del1 = psi_m - psi_m1;
    let del2 = psi_m - 2.0 * psi_m1 + psi_m2;
    let p1 = igamc(2f64.powi(m as i32 - 2), del1.max(0.0) / 2.0)?;
    let p2 = igamc(2f64.powi(m as i32 - 3), del2.max(0.0) / 2.0)?;
    Ok(TestOutcome::new("serial", psi_m, vec![p1, p2]))
}
