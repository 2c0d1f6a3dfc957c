//! Binary matrix rank test over disjoint 32x32 matrices.

use crate::error::{require_len, Result};
use crate::outcome::TestOutcome;
use crate::sequence::BitSequence;
use crate::special::igamc;

const ROWS: usize = 32;
const COLS: usize = 32;
const MIN_MATRICES: usize = 38;

/// Rank over GF(2) of a matrix whose rows are given as bit masks.
pub fn gf2_rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for col in (0..64).rev() {
        let bit = 1u64 << col;
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & bit != 0 {
                *row ^= p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Probability that a uniformly random `rows x cols` GF(2) matrix has rank `r`.
pub fn rank_probability(r: usize, rows: usize, cols: usize) -> f64 {
    let exponent = (r * (rows + cols - r)) as f64 - (rows * cols) as f64;
    let mut product = 1.0;
    for i in 0..r {
        let i = i as f64;
        product *= (1.0 - 2f64.powf(i - rows as f64)) * (1.0 - 2f64.powf(i - cols as f64))
            / (1.0 - 2f64.powf(i - r as f64));
    }
    2f64.powf(exponent) * product
}

pub fn binary_matrix_rank(seq: &BitSequence) -> Result<TestOutcome> {
    let n = seq.len();
    require_len("rank", MIN_MATRICES * ROWS * COLS, n)?;
    let full = rank_probability(ROWS, ROWS, COLS);
    let one_less = rank_probability(ROWS - 1, ROWS, COLS);
    let rest = 1.0 - full - one_less;

    let mut counts = [0usize; 3];
    for block in seq.bits().chunks_exact(ROWS * COLS) {
        let rows: Vec<u64> = block
            .chunks_exact(COLS)
            .map(|row| row.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
            .collect();
        match gf2_rank(&rows) {
            r if r == ROWS => counts[0] += 1,
            r if r == ROWS - 1 => counts[1] += 1,
            _ => counts[2] += 1,
        }
    }
    let matrices = (n / (ROWS * COLS)) as f64;
    let chi_sq: f64 = counts
        .iter()
        .zip([full, one_less, rest])
        .map(|(&f, p)| (f as f64 - p * matrices).powi(2) / (p * matrices))
        .sum();
    let p = igamc(1.0, chi_sq / 2.0)?;
    Ok(TestOutcome::new("rank", chi_sq, vec![p]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    /// Rank as log2 of the size of the row space, found by enumerating every
    /// combination of rows.
    fn rank_by_span(rows: &[u64]) -> usize {
        let mut span = HashSet::new();
        for mask in 0u32..(1 << rows.len()) {
            let v = rows
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0u64, |acc, (_, &r)| acc ^ r);
            span.insert(v);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn identity_and_zero() {
        let identity: Vec<u64> = (0..32).map(|i| 1u64 << i).collect();
        assert_eq!(gf2_rank(&identity), 32);
        assert_eq!(gf2_rank(&[0u64; 32]), 0);
    }

    #[test]
    fn elimination_matches_row_space_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let rows: Vec<u64> = (0..6).map(|_| rng.random::<u64>() & 0x3f).collect();
            assert_eq!(gf2_rank(&rows), rank_by_span(&rows));
        }
    }

    #[test]
    fn full_rank_probability() {
        let p32 = rank_probability(32, 32, 32);
        let p31 = rank_probability(31, 32, 32);
        assert!((p32 - 0.2888).abs() < 1e-4);
        assert!((p31 - 0.5776).abs() < 1e-4);
        assert!((1.0 - p32 - p31 - 0.1336).abs() < 1e-4);

        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let samples = 10_000;
        let full = (0..samples)
            .filter(|_| {
                let rows: Vec<u64> = (0..32).map(|_| rng.random::<u32>() as u64).collect();
                gf2_rank(&rows) == 32
            })
            .count();
        let sigma = (p32 * (1.0 - p32) / samples as f64).sqrt();
        assert!((full as f64 / samples as f64 - p32).abs() < 3.0 * sigma);
    }

    #[test]
    fn needs_38_matrices() {
        let s = BitSequence::from_bits(vec![0; 38 * 1024 - 1]);
        assert!(binary_matrix_rank(&s).is_err());
        let zeros = BitSequence::from_bits(vec![0; 38 * 1024]);
        assert!(binary_matrix_rank(&zeros).unwrap().p_value() < 1e-10);
    }
}
