//! The `test` command's analysis and its JSON report.

use std::fmt::Write as _;

use puf_trng_stats::{
    ent_metrics, run_battery, BatteryConfig, BatteryReport, BitSequence, EntReport,
};
use serde::{Deserialize, Serialize};

use crate::args::Battery;
use crate::error::{CliError, CliResult};

pub const REPORT_VERSION: u32 = 1;
pub const DEFAULT_SEQUENCE_LENGTH: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub report_version: u32,
    pub tool_version: String,
    pub input: InputSummary,
    pub battery: Battery,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nist: Option<BatteryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ent: Option<EntResult>,
    pub verdict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthSource {
    Sidecar,
    BitsExact,
    FileSize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub sha256: String,
    pub length_bits: u64,
    pub length_source: LengthSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_digest: Option<String>,
}

/// The ent metrics with a pass/fail reading: the chi-square exceed
/// probability must fall inside `[alpha, 1 - alpha]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntResult {
    pub metrics: EntReport,
    pub exceed_band_pct: [f64; 2],
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub battery: Battery,
    pub alpha: f64,
    pub sequence_length: Option<usize>,
    pub sequences: Option<usize>,
}

/// Bit `k` of an MSB-first packed buffer.
fn packed_bit(bytes: &[u8], k: usize) -> u8 {
    (bytes[k / 8] >> (7 - k % 8)) & 1
}

/// Splits the first `length_bits` of `bytes` into NIST sequences.
pub fn split_sequences(
    bytes: &[u8],
    length_bits: u64,
    sequence_length: Option<usize>,
    sequences: Option<usize>,
) -> CliResult<Vec<BitSequence>> {
    let total = length_bits as usize;
    if total == 0 {
        return Err(CliError::Usage("input holds no bits".into()));
    }
    let len = sequence_length.unwrap_or(DEFAULT_SEQUENCE_LENGTH.min(total));
    if len == 0 {
        return Err(CliError::Usage("sequence length must be positive".into()));
    }
    let fit = total / len;
    let count = sequences.unwrap_or(fit);
    if count == 0 || count > fit {
        return Err(CliError::Usage(format!(
            "{count} sequences of {len} bits do not fit in {total} bits"
        )));
    }
    Ok((0..count)
        .map(|i| BitSequence::from_bits((i * len..(i + 1) * len).map(|k| packed_bit(bytes, k))))
        .collect())
}

pub fn ent_result(bytes: &[u8], alpha: f64) -> CliResult<EntResult> {
    let metrics = ent_metrics(bytes).map_err(|e| CliError::Usage(e.to_string()))?;
    let band = [alpha * 100.0, (1.0 - alpha) * 100.0];
    let pass = (band[0]..=band[1]).contains(&metrics.chi_square_exceed_pct);
    Ok(EntResult {
        metrics,
        exceed_band_pct: band,
        pass,
    })
}

/// Runs the selected batteries over a packed stream.
pub fn analyze(
    bytes: &[u8],
    input: InputSummary,
    options: &AnalysisOptions,
) -> CliResult<TestReport> {
    if !(options.alpha > 0.0 && options.alpha < 0.5) {
        return Err(CliError::Usage(format!(
            "alpha must be in (0, 0.5), got {}",
            options.alpha
        )));
    }
    let nist = if options.battery.nist() {
        let seqs = split_sequences(
            bytes,
            input.length_bits,
            options.sequence_length,
            options.sequences,
        )?;
        let mut config = BatteryConfig::for_length(seqs[0].len(), seqs.len());
        config.alpha = options.alpha;
        Some(run_battery(&seqs, &config).map_err(|e| CliError::Usage(e.to_string()))?)
    } else {
        None
    };
    let ent = if options.battery.ent() {
        let whole = (input.length_bits / 8) as usize;
        Some(ent_result(&bytes[..whole], options.alpha)?)
    } else {
        None
    };
    let verdict = nist.as_ref().is_none_or(|r| r.verdict) && ent.as_ref().is_none_or(|e| e.pass);
    Ok(TestReport {
        report_version: REPORT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        input,
        battery: options.battery,
        alpha: options.alpha,
        nist,
        ent,
        verdict,
    })
}

fn mark(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

/// Human-readable summary.
pub fn render(report: &TestReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "input: {} bits ({:?}), sha256 {}",
        report.input.length_bits, report.input.length_source, report.input.sha256
    );
    if let Some(nist) = &report.nist {
        let c = &nist.config;
        let _ = writeln!(
            s,
            "nist: {} sequences x {} bits, alpha {}",
            nist.sequences.len(),
            c.sequence_length_bits,
            c.alpha
        );
        for p in &nist.proportions {
            let uniformity = p
                .uniformity_p
                .map(|u| format!("uniformity {u:.6}"))
                .unwrap_or_default();
            let _ = writeln!(
                s,
                "  {:<26} {:>4}/{:<4} min {:<4} {:<22} {}",
                p.test_name,
                p.passed,
                p.total,
                p.min_passes,
                uniformity,
                mark(p.pass)
            );
        }
        for skipped in &nist.skipped {
            let _ = writeln!(s, "  {:<26} skipped: {}", skipped.test_name, skipped.reason);
        }
    }
    if let Some(ent) = &report.ent {
        let m = &ent.metrics;
        let _ = writeln!(s, "ent: {} bytes", m.bytes);
        let _ = writeln!(
            s,
            "  entropy             {:.6} bits/byte",
            m.entropy_bits_per_byte
        );
        let _ = writeln!(s, "  optimum compression {}%", m.optimum_compression_pct);
        let _ = writeln!(
            s,
            "  chi-square          {:.2}, exceeded {:.2}% of the time  {}",
            m.chi_square,
            m.chi_square_exceed_pct,
            mark(ent.pass)
        );
        let _ = writeln!(s, "  mean                {:.4}", m.mean);
        let _ = writeln!(
            s,
            "  monte carlo pi      {:.9} (error {:.2}%)",
            m.monte_carlo_pi, m.monte_carlo_error_pct
        );
        let degenerate = if m.serial_correlation_degenerate {
            " (undefined, zero variance)"
        } else {
            ""
        };
        let _ = writeln!(
            s,
            "  serial correlation  {:.6}{degenerate}",
            m.serial_correlation
        );
    }
    let _ = writeln!(
        s,
        "verdict: {}",
        if report.verdict { "PASS" } else { "FAIL" }
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(length_bits: u64) -> InputSummary {
        InputSummary {
            sha256: String::new(),
            length_bits,
            length_source: LengthSource::FileSize,
            config_digest: None,
        }
    }

    #[test]
    fn splitting_respects_bit_offsets() {
        let bytes = [0b1010_0000, 0b0000_1111];
        let seqs = split_sequences(&bytes, 16, Some(5), None).unwrap();
        assert_eq!(seqs.len(), 3);
        assert_eq!(seqs[0].bits(), &[1, 0, 1, 0, 0]);
        assert_eq!(seqs[1].bits(), &[0, 0, 0, 0, 0]);
        assert_eq!(seqs[2].bits(), &[0, 0, 1, 1, 1]);
        assert!(split_sequences(&bytes, 16, Some(5), Some(4)).is_err());
        assert!(split_sequences(&bytes, 0, None, None).is_err());
    }

    #[test]
    fn short_input_is_one_sequence() {
        let bytes = vec![0x5a; 1000];
        let seqs = split_sequences(&bytes, 8000, None, None).unwrap();
        assert_eq!((seqs.len(), seqs[0].len()), (1, 8000));
    }

    #[test]
    fn ent_band() {
        let uniform: Vec<u8> = (0..=255).cycle().take(2560).collect();
        // a perfectly flat histogram is too good to be random
        assert!(!ent_result(&uniform, 0.01).unwrap().pass);
        assert!(ent_result(&[1, 2, 3], 0.01).is_err());
    }

    #[test]
    fn report_json_roundtrip() {
        let bytes: Vec<u8> = (0..20_000u32)
            .map(|i| (i.wrapping_mul(2654435761) >> 13) as u8)
            .collect();
        let options = AnalysisOptions {
            battery: Battery::All,
            alpha: 0.01,
            sequence_length: Some(40_000),
            sequences: None,
        };
        let report = analyze(&bytes, summary(160_000), &options).unwrap();
        assert_eq!(report.nist.as_ref().unwrap().sequences.len(), 4);
        let text = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<TestReport>(&text).unwrap(), report);
        assert!(render(&report).contains("verdict"));
    }

    #[test]
    fn alpha_is_checked() {
        let options = AnalysisOptions {
            battery: Battery::Ent,
            alpha: 0.7,
            sequence_length: None,
            sequences: None,
        };
        assert!(matches!(
            analyze(&[0; 64], summary(512), &options),
            Err(CliError::Usage(_))
        ));
    }
}
