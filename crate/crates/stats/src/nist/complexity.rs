//! Linear complexity test and the Berlekamp-Massey algorithm over GF(2).

use crate::error::{Result, StatError};
use crate::outcome::TestOutcome;
use crate::sequence::BitSequence;
use crate::special::igamc;

const CLASS_PROBABILITIES: [f64; 7] = [0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833];

/// 64 bits of `words` starting at bit `offset` (bits past the end read 0).
fn window(words: &[u64], offset: usize) -> u64 {
    let (w, s) = (offset / 64, offset % 64);
    let lo = words.get(w).copied().unwrap_or(0);
    if s == 0 {
        lo
    } else {
        let hi = words.get(w + 1).copied().unwrap_or(0);
        (lo >> s) | (hi << (64 - s))
    }
}

/// `dst ^= src << shift` on little-endian bit vectors.
fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    for (i, &word) in src.iter().enumerate() {
        if word == 0 {
            continue;
        }
        let j = i + ws;
        if j < dst.len() {
            dst[j] ^= word << bs;
        }
        if bs != 0 && j + 1 < dst.len() {
            dst[j + 1] ^= word >> (64 - bs);
        }
    }
}

/// Length of the shortest LFSR that generates `bits`.
pub fn berlekamp_massey(bits: &[u8]) -> usize {
    let n = bits.len();
    if n == 0 {
        return 0;
    }
    let words = (n + 1).div_ceil(64);
    // sequence stored reversed so that a connection polynomial lines up with
    // the most recent bits as a plain word-wise AND
    let mut rev = vec![0u64; n.div_ceil(64) + 1];
    for (i, &b) in bits.iter().enumerate() {
        if b != 0 {
            let k = n - 1 - i;
            rev[k / 64] |= 1 << (k % 64);
        }
    }
    let mut c = vec![0u64; words];
    let mut b = vec![0u64; words];
    c[0] = 1;
    b[0] = 1;
    let mut len = 0usize;
    let mut last = 0usize; // position of the last length change, plus one
    for i in 0..n {
        let offset = n - 1 - i;
        let active = i / 64 + 1;
        let parity = c[..active.min(words)]
            .iter()
            .enumerate()
            .fold(0u32, |acc, (w, &cw)| {
                acc ^ (cw & window(&rev, offset + 64 * w)).count_ones()
            });
        if parity & 1 == 0 {
            continue;
        }
        let shift = i + 1 - last;
        if 2 * len <= i {
            let previous = c.clone();
            xor_shifted(&mut c, &b, shift);
            len = i + 1 - len;
            last = i + 1;
            b = previous;
        } else {
            xor_shifted(&mut c, &b, shift);
        }
    }
    len
}

/// Expected linear complexity of a random `m`-bit block.
fn mean_complexity(m: usize) -> f64 {
    let mf = m as f64;
    let sign = if m.is_multiple_of(2) { -1.0 } else { 1.0 }; // (-1)^(m+1)
    mf / 2.0 + (9.0 + sign) / 36.0 - (mf / 3.0 + 2.0 / 9.0) / 2f64.powi(m.min(1000) as i32)
}

pub fn linear_complexity(seq: &BitSequence, block_len: usize) -> Result<TestOutcome> {
    linear_complexity_with(seq, block_len, &CLASS_PROBABILITIES)
}

#[doc(hidden)]
pub fn linear_complexity_with(
    seq: &BitSequence,
    block_len: usize,
    class_probabilities: &[f64; 7],
) -> Result<TestOutcome> {
    if block_len < 2 {
        return Err(StatError::Parameter {
            test: "linear_complexity",
            reason: format!("block length must be at least 2, got {block_len}"),
        });
    }
    let n = seq.len();
    if n < block_len {
        return Err(StatError::Length {
            test: "linear_complexity",
            required: block_len,
            actual: n,
        });
    }
    let mu = mean_complexity(block_len);
    let sign = if block_len.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }; // (-1)^M
    let mut counts = [0usize; 7];
    for block in seq.bits().chunks_exact(block_len) {
        let t = sign * (berlekamp_massey(block) as f64 - mu) + 2.0 / 9.0;
        let class = if t <= -2.5 {
            0
        } else if t <= -1.5 {
            1
        } else if t <= -0.5 {
            2
        } else if t <= 0.5 {
            3
        } else if t <= 1.5 {
            4
        } else if t <= 2.5 {
            5
        } else {
            6
        };
        counts[class] += 1;
    }
    let blocks = (n / block_len) as f64;
    let chi_sq: f64 = counts
        .iter()
        .zip(class_probabilities)
        .map(|(&v, &p)| (v as f64 - blocks * p).powi(2) / (blocks * p))
        .sum();
    let p = igamc(3.0, chi_sq / 2.0)?;
    Ok(TestOutcome::new("linear_complexity", chi_sq, vec![p]))
}
