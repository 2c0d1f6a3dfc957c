//! Runs test and the longest-run-of-ones test.

use crate::error::{require_len, Result};
use crate::outcome::TestOutcome;
use crate::sequence::BitSequence;
use crate::special::{erfc, igamc};

pub fn runs(seq: &BitSequence) -> Result<TestOutcome> {
    let n = seq.len();
    require_len("runs", 1, n)?;
    let nf = n as f64;
    let pi = seq.ones() as f64 / nf;
    let v_obs = 1 + seq.bits().windows(2).filter(|w| w[0] != w[1]).count();
    // frequency prerequisite
    if (pi - 0.5).abs() >= 2.0 / nf.sqrt() {
        return Ok(TestOutcome::new("runs", v_obs as f64, vec![0.0]));
    }
    let spread = pi * (1.0 - pi);
    let p = erfc((v_obs as f64 - 2.0 * nf * spread).abs() / (2.0 * (2.0 * nf).sqrt() * spread));
    Ok(TestOutcome::new("runs", v_obs as f64, vec![p]))
}

/// Block size, category boundaries and reference probabilities for the
/// longest-run test at a given sequence length.
pub(crate) struct LongestRunTable {
    pub block_len: usize,
    /// Longest runs at or below `min_run` share the first category.
    pub min_run: usize,
    pub probabilities: &'static [f64],
}

const LONGEST_RUN_8: [f64; 4] = [0.21484375, 0.3671875, 0.23046875, 0.1875];
const LONGEST_RUN_128: [f64; 6] = [
    0.1174035788,
    0.242955959,
    0.249363483,
    0.17517706,
    0.102701071,
    0.112398847,
];
const LONGEST_RUN_10000: [f64; 7] = [0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727];

pub(crate) fn longest_run_table(n: usize) -> LongestRunTable {
    if n < 6272 {
        LongestRunTable {
            block_len: 8,
            min_run: 1,
            probabilities: &LONGEST_RUN_8,
        }
    } else if n < 750_000 {
        LongestRunTable {
            block_len: 128,
            min_run: 4,
            probabilities: &LONGEST_RUN_128,
        }
    } else {
        LongestRunTable {
            block_len: 10_000,
            min_run: 10,
            probabilities: &LONGEST_RUN_10000,
        }
    }
}

pub fn longest_run_of_ones(seq: &BitSequence) -> Result<TestOutcome> {
    let n = seq.len();
    require_len("longest_run", 128, n)?;
    let table = longest_run_table(n);
    let classes = table.probabilities.len();
    let mut counts = vec![0usize; classes];
    for block in seq.bits().chunks_exact(table.block_len) {
        let (mut run, mut longest) = (0usize, 0usize);
        for &b in block {
            run = if b == 1 { run + 1 } else { 0 };
            longest = longest.max(run);
        }
        let class = longest.clamp(table.min_run, table.min_run + classes - 1) - table.min_run;
        counts[class] += 1;
    }
    let blocks = (n / table.block_len) as f64;
    let chi_sq: f64 = counts
        .iter()
        .zip(table.probabilities)
        .map(|(&v, &p)| (v as f64 - blocks * p).powi(2) / (blocks * p))
        .sum();
    let p = igamc((classes - 1) as f64 / 2.0, chi_sq / 2.0)?;
    Ok(TestOutcome::new("longest_run", chi_sq, vec![p]))
}
