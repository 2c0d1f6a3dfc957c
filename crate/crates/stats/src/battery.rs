//! Runs the in-scope tests over a set of sequences and aggregates pass
//! proportions.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StatError};
use crate::nist;
use crate::outcome::TestOutcome;
use crate::sequence::BitSequence;
use crate::special::igamc;

pub const REPORT_VERSION: u32 = 1;

/// Sequences needed before p-value uniformity is reported.
const MIN_UNIFORMITY_SEQUENCES: usize = 55;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub alpha: f64,
    pub sequence_length_bits: usize,
    pub sequence_count: usize,
    pub block_frequency_m: usize,
    pub approximate_entropy_m: usize,
    pub serial_m: usize,
    pub linear_complexity_m: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            sequence_length_bits: 1_000_000,
            sequence_count: 100,
            block_frequency_m: 128,
            approximate_entropy_m: 10,
            serial_m: 16,
            linear_complexity_m: 500,
        }
    }
}

impl BatteryConfig {
    /// Defaults with the pattern orders reduced where `length_bits` is too
    /// short for them: `m <= log2(n) - 8` for approximate entropy, whose
    /// p-values skew low near the usual `log2(n) - 5` limit, and
    /// `m < log2(n) - 2` for serial.
    pub fn for_length(length_bits: usize, sequence_count: usize) -> Self {
        let log2 = (length_bits.max(2) as f64).log2().floor() as usize;
        let base = Self::default();
        Self {
            sequence_length_bits: length_bits,
            sequence_count,
            approximate_entropy_m: base
                .approximate_entropy_m
                .min(log2.saturating_sub(8))
                .max(2),
            serial_m: base.serial_m.min(log2.saturating_sub(3)).max(1),
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| StatError::Parameter {
            test: "battery",
            reason,
        };
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(bad(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        if self.block_frequency_m == 0 {
            return Err(bad("block frequency M must be positive".into()));
        }
        if self.approximate_entropy_m == 0 || self.approximate_entropy_m >= nist::MAX_PATTERN_BITS {
            return Err(bad(format!(
                "approximate entropy m out of range: {}",
                self.approximate_entropy_m
            )));
        }
        if self.serial_m == 0 || self.serial_m >= nist::MAX_PATTERN_BITS {
            return Err(bad(format!("serial m out of range: {}", self.serial_m)));
        }
        if self.linear_complexity_m < 2 {
            return Err(bad("linear complexity M must be at least 2".into()));
        }
        Ok(())
    }

    /// The SP 800-22 acceptance proportion for `total` sequences.
    pub fn lower_bound(&self, total: usize) -> f64 {
        proportion_lower_bound(self.alpha, total)
    }
}

/// `p - 3 sqrt(p (1 - p) / total)` with `p = 1 - alpha`.
pub fn proportion_lower_bound(alpha: f64, total: usize) -> f64 {
    let p = 1.0 - alpha;
    p - 3.0 * (p * (1.0 - p) / total as f64).sqrt()
}

/// Passing sequences required out of `total`: the lower bound scaled to a
/// whole number of sequences, rounded to nearest.
pub fn min_passes(alpha: f64, total: usize) -> usize {
    (proportion_lower_bound(alpha, total) * total as f64).round() as usize
}

/// One test (or one p-value channel of a test) on one sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub name: String,
    pub params: BTreeMap<String, usize>,
    pub statistic: Option<f64>,
    pub p_values: Vec<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceResult {
    pub index: usize,
    pub results: Vec<TestRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionResult {
    pub test_name: String,
    pub passed: usize,
    pub total: usize,
    pub lower_bound: f64,
    pub min_passes: usize,
    /// Chi-square uniformity of the p-values over ten bins; informational.
    pub uniformity_p: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedTest {
    pub test_name: String,
    pub sequences: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub report_version: u32,
    pub config: BatteryConfig,
    pub sequences: Vec<SequenceResult>,
    pub proportions: Vec<ProportionResult>,
    pub skipped: Vec<SkippedTest>,
    pub verdict: bool,
}

impl BatteryReport {
    pub fn proportion(&self, channel: &str) -> Option<&ProportionResult> {
        self.proportions.iter().find(|p| p.test_name == channel)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Test {
    Frequency,
    BlockFrequency,
    CumulativeSums,
    Runs,
    LongestRun,
    Rank,
    Fft,
    ApproximateEntropy,
    Serial,
    LinearComplexity,
}

const TESTS: [Test; 10] = [
    Test::Frequency,
    Test::BlockFrequency,
    Test::CumulativeSums,
    Test::Runs,
    Test::LongestRun,
    Test::Rank,
    Test::Fft,
    Test::ApproximateEntropy,
    Test::Serial,
    Test::LinearComplexity,
];

impl Test {
    fn name(self) -> &'static str {
        match self {
            Test::Frequency => "frequency",
            Test::BlockFrequency => "block_frequency",
            Test::CumulativeSums => "cumulative_sums",
            Test::Runs => "runs",
            Test::LongestRun => "longest_run",
            Test::Rank => "rank",
            Test::Fft => "fft",
            Test::ApproximateEntropy => "approximate_entropy",
            Test::Serial => "serial",
            Test::LinearComplexity => "linear_complexity",
        }
    }

    /// Names of the p-value channels, in `TestOutcome::p_values` order.
    fn channels(self) -> Vec<String> {
        match self {
            Test::CumulativeSums => vec![
                "cumulative_sums_forward".into(),
                "cumulative_sums_reverse".into(),
            ],
            Test::Serial => vec!["serial_1".into(), "serial_2".into()],
            t => vec![t.name().into()],
        }
    }

    fn params(self, config: &BatteryConfig) -> BTreeMap<String, usize> {
        let entry = |k: &str, v| BTreeMap::from([(k.to_string(), v)]);
        match self {
            Test::BlockFrequency => entry("M", config.block_frequency_m),
            Test::ApproximateEntropy => entry("m", config.approximate_entropy_m),
            Test::Serial => entry("m", config.serial_m),
            Test::LinearComplexity => entry("M", config.linear_complexity_m),
            _ => BTreeMap::new(),
        }
    }

    fn run(self, seq: &BitSequence, config: &BatteryConfig) -> Result<TestOutcome> {
        match self {
            Test::Frequency => nist::frequency_monobit(seq),
            Test::BlockFrequency => nist::block_frequency(seq, config.block_frequency_m),
            Test::CumulativeSums => nist::cumulative_sums(seq),
            Test::Runs => nist::runs(seq),
            Test::LongestRun => nist::longest_run_of_ones(seq),
            Test::Rank => nist::binary_matrix_rank(seq),
            Test::Fft => nist::dft_spectral(seq),
            Test::ApproximateEntropy => {
                nist::approximate_entropy(seq, config.approximate_entropy_m)
            }
            Test::Serial => nist::serial(seq, config.serial_m),
            Test::LinearComplexity => nist::linear_complexity(seq, config.linear_complexity_m),
        }
    }
}

fn run_sequence(index: usize, seq: &BitSequence, config: &BatteryConfig) -> SequenceResult {
    let results = TESTS
        .iter()
        .map(|&test| {
            let params = test.params(config);
            match test.run(seq, config) {
                Ok(outcome) => {
                    let outcome = outcome.with_alpha(config.alpha);
                    TestRecord {
                        name: test.name().into(),
                        params,
                        statistic: Some(outcome.statistic),
                        p_values: outcome.p_values,
                        pass: outcome.pass,
                        skipped: None,
                    }
                }
                Err(e) => TestRecord {
                    name: test.name().into(),
                    params,
                    statistic: None,
                    p_values: Vec::new(),
                    pass: false,
                    skipped: Some(e.to_string()),
                },
            }
        })
        .collect();
    SequenceResult { index, results }
}

fn uniformity(p_values: &[f64]) -> Option<f64> {
    if p_values.len() < MIN_UNIFORMITY_SEQUENCES {
        return None;
    }
    let mut bins = [0usize; 10];
    for &p in p_values {
        bins[((p * 10.0) as usize).min(9)] += 1;
    }
    let expected = p_values.len() as f64 / 10.0;
    let chi_sq: f64 = bins
        .iter()
        .map(|&b| (b as f64 - expected).powi(2) / expected)
        .sum();
    igamc(4.5, chi_sq / 2.0).ok()
}

/// Runs every in-scope test on every sequence. Tests a sequence is too short
/// for are recorded as skipped rather than failed.
pub fn run_battery(streams: &[BitSequence], config: &BatteryConfig) -> Result<BatteryReport> {
    config.validate()?;
    let sequences: Vec<SequenceResult> = streams
        .par_iter()
        .enumerate()
        .map(|(i, seq)| run_sequence(i, seq, config))
        .collect();

    let mut proportions = Vec::new();
    let mut skipped = Vec::new();
    for (t, test) in TESTS.iter().enumerate() {
        let records: Vec<&TestRecord> = sequences.iter().map(|s| &s.results[t]).collect();
        let ran: Vec<&&TestRecord> = records.iter().filter(|r| r.skipped.is_none()).collect();
        let skip_count = records.len() - ran.len();
        if skip_count > 0 {
            let reason = records
                .iter()
                .find_map(|r| r.skipped.clone())
                .unwrap_or_default();
            skipped.push(SkippedTest {
                test_name: test.name().into(),
                sequences: skip_count,
                reason,
            });
        }
        if ran.is_empty() {
            continue;
        }
        for (c, channel) in test.channels().into_iter().enumerate() {
            let p_values: Vec<f64> = ran.iter().map(|r| r.p_values[c]).collect();
            let total = p_values.len();
            let passed = p_values.iter().filter(|&&p| p >= config.alpha).count();
            let needed = min_passes(config.alpha, total);
            proportions.push(ProportionResult {
                test_name: channel,
                passed,
                total,
                lower_bound: config.lower_bound(total),
                min_passes: needed,
                uniformity_p: uniformity(&p_values),
                pass: passed >= needed,
            });
        }
    }
    let verdict = !proportions.is_empty() && proportions.iter().all(|p| p.pass);
    Ok(BatteryReport {
        report_version: REPORT_VERSION,
        config: config.clone(),
        sequences,
        proportions,
        skipped,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_for_100() {
        let lb = proportion_lower_bound(0.01, 100);
        assert!((lb - (0.99 - 3.0 * (0.0099f64 / 100.0).sqrt())).abs() < 1e-12);
        assert!((lb - 0.9602).abs() < 1e-4);
        assert_eq!(min_passes(0.01, 100), 96);
    }

    #[test]
    fn recommended_orders_shrink_with_length() {
        let long = BatteryConfig::for_length(1_000_000, 1);
        assert_eq!((long.approximate_entropy_m, long.serial_m), (10, 16));
        let short = BatteryConfig::for_length(100_000, 1);
        assert_eq!((short.approximate_entropy_m, short.serial_m), (8, 13));
        let tiny = BatteryConfig::for_length(1000, 1);
        assert_eq!((tiny.approximate_entropy_m, tiny.serial_m), (2, 6));
    }

    #[test]
    fn config_validation() {
        let mut c = BatteryConfig::default();
        assert!(c.validate().is_ok());
        c.alpha = 1.0;
        assert!(c.validate().is_err());
        c = BatteryConfig {
            serial_m: 0,
            ..Default::default()
        };
        assert!(run_battery(&[], &c).is_err());
    }

    #[test]
    fn constant_sequences_fail_frequency() {
        let seqs = vec![BitSequence::from_bits(vec![0u8; 2000]); 100];
        let report = run_battery(&seqs, &BatteryConfig::for_length(2000, 100)).unwrap();
        let freq = report.proportion("frequency").unwrap();
        assert_eq!((freq.passed, freq.total), (0, 100));
        assert!(!report.verdict);
        // rank needs 38 912 bits
        assert!(report
            .skipped
            .iter()
            .any(|s| s.test_name == "rank" && s.sequences == 100));
        assert!(report.proportion("rank").is_none());
    }

    #[test]
    fn channels_are_split() {
        let seq = BitSequence::from_bits((0..2000u32).map(|i| ((i * 7919) >> 3 & 1) as u8));
        let report = run_battery(&[seq], &BatteryConfig::for_length(2000, 1)).unwrap();
        for name in [
            "cumulative_sums_forward",
            "cumulative_sums_reverse",
            "serial_1",
            "serial_2",
        ] {
            assert!(report.proportion(name).is_some(), "{name}");
        }
    }
}
