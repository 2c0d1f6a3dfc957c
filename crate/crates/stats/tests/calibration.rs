//! Behaviour of the tests on a seeded uniform reference generator.

use puf_trng_stats::battery::min_passes;
use puf_trng_stats::nist::{dft_spectral, longest_run_of_ones};
use puf_trng_stats::*;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn reference_sequences(seed: u64, count: usize, bits: usize) -> Vec<BitSequence> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut bytes = vec![0u8; bits.div_ceil(8)];
            rng.fill_bytes(&mut bytes);
            BitSequence::from_packed(&bytes, bits).unwrap()
        })
        .collect()
}

#[test]
fn longest_run_accepts_reference_streams() {
    let passes = reference_sequences(101, 100, 1_000_000)
        .iter()
        .filter(|s| longest_run_of_ones(s).unwrap().p_value() >= 0.01)
        .count();
    assert!(passes >= 98, "{passes}/100");
}

#[test]
fn spectral_test_accepts_reference_streams() {
    let passes = reference_sequences(102, 100, 100_000)
        .iter()
        .filter(|s| dft_spectral(s).unwrap().p_value() >= 0.01)
        .count();
    assert!(passes >= 98, "{passes}/100");
}

#[test]
fn battery_accepts_reference_streams() {
    let seqs = reference_sequences(103, 100, 100_000);
    let config = BatteryConfig::for_length(100_000, 100);
    let report = run_battery(&seqs, &config).unwrap();
    assert!(report.skipped.is_empty(), "{:?}", report.skipped);
    assert_eq!(report.proportions.len(), 12);
    for p in &report.proportions {
        assert_eq!(p.total, 100);
        assert_eq!(p.min_passes, min_passes(0.01, 100));
        assert!(p.pass, "{p:?}");
    }
    assert!(report.verdict);
}

#[test]
fn p_values_are_uniform_on_reference_streams() {
    let seqs = reference_sequences(104, 1000, 100_000);
    let config = BatteryConfig::for_length(100_000, 1000);
    let report = run_battery(&seqs, &config).unwrap();
    for p in &report.proportions {
        let u = p
            .uniformity_p
            .expect("enough sequences for the uniformity check");
        assert!(u >= 0.001, "{}: uniformity p = {u}", p.test_name);
    }
}

#[test]
fn constant_sequences_fail_frequency() {
    let seqs = vec![BitSequence::from_bits(vec![1u8; 100_000]); 100];
    let report = run_battery(&seqs, &BatteryConfig::for_length(100_000, 100)).unwrap();
    let freq = report.proportion("frequency").unwrap();
    assert_eq!(freq.passed, 0);
    assert!(!freq.pass);
    assert!(!report.verdict);
}

#[test]
fn ent_on_ten_million_reference_bits() {
    let mut bytes = vec![0u8; 1_250_000];
    ChaCha20Rng::seed_from_u64(105).fill_bytes(&mut bytes);
    let r = ent_metrics(&bytes).unwrap();
    assert!(r.entropy_bits_per_byte >= 7.9995, "{r:?}");
    assert!((r.mean - 127.5).abs() <= 0.3, "{r:?}");
    assert!(
        (r.monte_carlo_pi - std::f64::consts::PI).abs() <= 0.02,
        "{r:?}"
    );
    assert!(r.serial_correlation.abs() <= 0.01, "{r:?}");
    assert!((1.0..=99.0).contains(&r.chi_square_exceed_pct), "{r:?}");
}
