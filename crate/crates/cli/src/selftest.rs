//! Built-in consistency checks run by `puf-trng selftest`.

use puf_trng_core::{
    feature_transform, lfsr_period, linear_delay, model_weights, propagate, sample_puf, Challenge,
    PufParameters, RegisterState, TapSet,
};
use puf_trng_stats::nist;
use puf_trng_stats::{BitSequence, TestOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

pub const BUILTIN_KAT: &str = include_str!("kat.json");

/// One known-answer vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnownAnswer {
    pub test: String,
    pub bits: String,
    /// Block length or pattern order, for the tests that take one.
    #[serde(default)]
    pub m: Option<usize>,
    pub expected: Vec<f64>,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

pub fn parse_kat(text: &str) -> Result<Vec<KnownAnswer>, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn run_selftest(kat: &[KnownAnswer]) -> Vec<Check> {
    let mut checks: Vec<Check> = kat.iter().map(check_known_answer).collect();
    if kat.is_empty() {
        checks.push(Check::new("known answers", false, "table is empty"));
    }
    checks.push(check_puf_oracle());
    checks.push(check_lfsr_periods());
    checks.push(check_p_value_range());
    checks
}

fn run_named(test: &str, seq: &BitSequence, m: Option<usize>) -> Result<TestOutcome, String> {
    let need_m = || m.ok_or_else(|| format!("{test} needs m"));
    let out = match test {
        "frequency" => nist::frequency_monobit(seq),
        "block_frequency" => nist::block_frequency(seq, need_m()?),
        "runs" => nist::runs(seq),
        "longest_run" => nist::longest_run_of_ones(seq),
        "rank" => nist::binary_matrix_rank(seq),
        "fft" => nist::dft_spectral(seq),
        "cumulative_sums" => nist::cumulative_sums(seq),
        "approximate_entropy" => nist::approximate_entropy(seq, need_m()?),
        "serial" => nist::serial(seq, need_m()?),
        "linear_complexity" => nist::linear_complexity(seq, need_m()?),
        other => return Err(format!("unknown test {other:?}")),
    };
    out.map_err(|e| e.to_string())
}

fn check_known_answer(k: &KnownAnswer) -> Check {
    let name = format!("known answer {} {}", k.test, k.bits);
    let seq = match BitSequence::from_ascii(&k.bits) {
        Ok(s) => s,
        Err(e) => return Check::new(name, false, e.to_string()),
    };
    let outcome = match run_named(&k.test, &seq, k.m) {
        Ok(o) => o,
        Err(e) => return Check::new(name, false, e),
    };
    if k.expected.is_empty() || k.expected.len() > outcome.p_values.len() {
        return Check::new(
            name,
            false,
            "expected values do not match the test's p-values",
        );
    }
    let worst = k
        .expected
        .iter()
        .zip(&outcome.p_values)
        .map(|(e, p)| (e - p).abs())
        .fold(0.0, f64::max);
    let pass = worst <= k.tolerance;
    Check::new(
        name,
        pass,
        format!(
            "p = {:?}, max deviation {worst:.2e}",
            &outcome.p_values[..k.expected.len()]
        ),
    )
}

/// Stage-by-stage race against the linear model on every challenge.
fn check_puf_oracle() -> Check {
    let mut worst = 0.0f64;
    for n in 1..=8 {
        for seed in 0..4 {
            let params = PufParameters {
                n_stages: n,
                instance_seed: seed,
                ..Default::default()
            };
            let inst = sample_puf(&params).expect("valid parameters");
            let w = model_weights(&inst);
            for c in 0..(1u64 << n) {
                let ch = Challenge::from_u64(c, n);
                let race = propagate(&inst, &ch).expect("matching length");
                worst = worst.max((race - linear_delay(&w, &feature_transform(&ch))).abs());
            }
        }
    }
    Check::new(
        "PUF race equals linear model (n <= 8)",
        worst <= 1e-12,
        format!("max deviation {worst:.2e}"),
    )
}

fn check_lfsr_periods() -> Check {
    let period = |taps: [usize; 2]| {
        let taps = TapSet::new(taps).expect("valid taps");
        let seed = RegisterState::unit(taps.degree()).expect("valid degree");
        lfsr_period(&taps, &seed).expect("small degree")
    };
    let (p43, p76, p42) = (period([4, 3]), period([7, 6]), period([4, 2]));
    Check::new(
        "LFSR periods",
        p43 == 15 && p76 == 127 && p42 < 15,
        format!("{{4,3}} -> {p43}, {{7,6}} -> {p76}, {{4,2}} -> {p42}"),
    )
}

/// Every p-value stays in [0, 1] on random and degenerate inputs.
fn check_p_value_range() -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5e1f);
    let mut inputs: Vec<BitSequence> = (0..150)
        .map(|_| {
            let len = rng.random_range(1..4000);
            let density: f64 = rng.random();
            BitSequence::from_bits((0..len).map(|_| u8::from(rng.random_bool(density))))
        })
        .collect();
    for len in [1000, 40_000] {
        inputs.push(BitSequence::from_bits(vec![0; len]));
        inputs.push(BitSequence::from_bits(vec![1; len]));
        inputs.push(BitSequence::from_bits((0..len).map(|i| (i % 2) as u8)));
    }
    let tests = [
        ("frequency", None),
        ("block_frequency", Some(16)),
        ("runs", None),
        ("longest_run", None),
        ("rank", None),
        ("fft", None),
        ("cumulative_sums", None),
        ("approximate_entropy", Some(3)),
        ("serial", Some(4)),
        ("linear_complexity", Some(50)),
    ];
    let mut evaluated = 0usize;
    for seq in &inputs {
        for (test, m) in tests {
            // inputs too short for a test are skipped
            let Ok(outcome) = run_named(test, seq, m) else {
                continue;
            };
            evaluated += 1;
            if let Some(p) = outcome.p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Check::new(
                    "p-values in [0, 1]",
                    false,
                    format!("{test} gave {p} on {} bits", seq.len()),
                );
            }
        }
    }
    Check::new(
        "p-values in [0, 1]",
        evaluated > 0,
        format!("{evaluated} evaluations on {} inputs", inputs.len()),
    )
}
