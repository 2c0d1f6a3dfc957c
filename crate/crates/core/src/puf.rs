//! Arbiter PUF under the additive delay model.
//!
//! Each switch stage carries four path delays. A challenge bit of 0 lets the
//! two racing edges pass straight through; a 1 crosses them over. After the
//! last stage the arbiters compare arrival times. Two arbiters are used, each
//! with an extra delay `e` inserted on one of its inputs, so that they only
//! agree when the race margin exceeds `e`.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version tag written into serialized instances.
pub const INSTANCE_FORMAT_VERSION: u32 = 1;

/// Nominal delay of every path before process variation is applied.
pub const NOMINAL_DELAY: f64 = 10.0;

/// Device-level parameters of a simulated arbiter PUF.
///
/// All delays are in dimensionless time units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PufParameters {
    pub n_stages: usize,
    pub sigma_process: f64,
    pub sigma_noise: f64,
    pub arbiter_offset: f64,
    pub instance_seed: u64,
}

impl Default for PufParameters {
    fn default() -> Self {
        Self {
            n_stages: 128,
            sigma_process: 1.0,
            sigma_noise: 0.05,
            arbiter_offset: 0.02,
            instance_seed: 42,
        }
    }
}

impl PufParameters {
    pub fn validate(&self) -> Result<()> {
        if self.n_stages == 0 {
            return Err(Error::Parameter("n_stages must be at least 1".into()));
        }
        let reals = [
            ("sigma_process", self.sigma_process),
            ("sigma_noise", self.sigma_noise),
            ("arbiter_offset", self.arbiter_offset),
        ];
        for (name, value) in reals {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Parameter(format!(
                    "{name} must be finite and nonnegative, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// The four path delays of one switch stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageDelays {
    /// Top input to top output (challenge bit 0).
    pub straight_top: f64,
    /// Bottom input to bottom output (challenge bit 0).
    pub straight_bottom: f64,
    /// Top input to bottom output (challenge bit 1).
    pub cross_down: f64,
    /// Bottom input to top output (challenge bit 1).
    pub cross_up: f64,
}

impl StageDelays {
    fn is_finite(&self) -> bool {
        [
            self.straight_top,
            self.straight_bottom,
            self.cross_down,
            self.cross_up,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// Delay difference added when the stage passes straight.
    fn straight_skew(&self) -> f64 {
        self.straight_bottom - self.straight_top
    }

    /// Delay difference added (after the lane swap) when the stage crosses.
    fn cross_skew(&self) -> f64 {
        self.cross_down - self.cross_up
    }
}

/// One challenge: `n_stages` bits, bit `i` driving switch stage `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Challenge {
    len: usize,
    words: Vec<u64>,
}

impl Challenge {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Builds a challenge from 0/1 values. Any nonzero byte counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut challenge = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            challenge.set(i, b != 0);
        }
        challenge
    }

    /// Low `len` bits of `value`, bit `i` of the integer is challenge bit `i`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "challenge wider than 64 bits");
        let mut challenge = Self::zeros(len);
        if len > 0 {
            let mask = if len == 64 {
                u64::MAX
            } else {
                (1u64 << len) - 1
            };
            challenge.words[0] = value & mask;
        }
        challenge
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), len.div_ceil(64));
        Self { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "challenge bit {i} out of range");
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "challenge bit {i} out of range");
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }
}

/// A manufactured device: parameters plus the frozen per-stage delays.
#[derive(Clone, Debug, PartialEq)]
pub struct PufInstance {
    params: PufParameters,
    stages: Vec<StageDelays>,
    // (straight, cross) skew per stage
    skews: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDocument {
    format_version: u32,
    params: PufParameters,
    stages: Vec<StageDelays>,
}

impl PufInstance {
    /// Assembles an instance from explicit stage delays.
    pub fn from_stages(params: PufParameters, stages: Vec<StageDelays>) -> Result<Self> {
        params.validate()?;
        if stages.len() != params.n_stages {
            return Err(Error::Dimension {
                expected: params.n_stages,
                actual: stages.len(),
            });
        }
        if let Some(i) = stages.iter().position(|s| !s.is_finite()) {
            return Err(Error::Parameter(format!(
                "stage {i} has a non-finite delay"
            )));
        }
        let skews = stages
            .iter()
            .map(|s| (s.straight_skew(), s.cross_skew()))
            .collect();
        Ok(Self {
            params,
            stages,
            skews,
        })
    }

    pub fn params(&self) -> &PufParameters {
        &self.params
    }

    pub fn stages(&self) -> &[StageDelays] {
        &self.stages
    }

    pub fn n_stages(&self) -> usize {
        self.params.n_stages
    }

    /// Delay difference for a packed challenge, no length check.
    pub(crate) fn delay_difference(&self, words: &[u64]) -> f64 {
        let mut delta = 0.0;
        for (i, &(straight, cross)) in self.skews.iter().enumerate() {
            if (words[i / 64] >> (i % 64)) & 1 == 1 {
                delta = cross - delta;
            } else {
                delta += straight;
            }
        }
        delta
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = InstanceDocument {
            format_version: INSTANCE_FORMAT_VERSION,
            params: self.params.clone(),
            stages: self.stages.clone(),
        };
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDocument = serde_json::from_str(text)?;
        if doc.format_version != INSTANCE_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported instance format version {}",
                doc.format_version
            )));
        }
        Self::from_stages(doc.params, doc.stages)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Samples a device. Every path delay is `NOMINAL_DELAY` plus an independent
/// Gaussian deviation with standard deviation `sigma_process`, drawn from a
/// ChaCha20 stream seeded with `instance_seed`.
pub fn sample_puf(params: &PufParameters) -> Result<PufInstance> {
    params.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(params.instance_seed);
    let normal = Normal::new(NOMINAL_DELAY, params.sigma_process)
        .map_err(|e| Error::Parameter(e.to_string()))?;
    let stages = (0..params.n_stages)
        .map(|_| StageDelays {
            straight_top: normal.sample(&mut rng),
            straight_bottom: normal.sample(&mut rng),
            cross_down: normal.sample(&mut rng),
            cross_up: normal.sample(&mut rng),
        })
        .collect();
    PufInstance::from_stages(params.clone(), stages)
}

/// Noiseless final delay difference `t_bottom - t_top`, computed by racing
/// the two edges through every stage.
pub fn propagate(instance: &PufInstance, challenge: &Challenge) -> Result<f64> {
    check_len(instance, challenge)?;
    let (mut top, mut bottom) = (0.0_f64, 0.0_f64);
    for (stage, c) in instance.stages.iter().zip(challenge.bits()) {
        (top, bottom) = if c {
            (bottom + stage.cross_up, top + stage.cross_down)
        } else {
            (top + stage.straight_top, bottom + stage.straight_bottom)
        };
    }
    Ok(bottom - top)
}

fn check_len(instance: &PufInstance, challenge: &Challenge) -> Result<()> {
    if challenge.len() != instance.n_stages() {
        return Err(Error::Dimension {
            expected: instance.n_stages(),
            actual: challenge.len(),
        });
    }
    Ok(())
}

/// Parity features of a challenge: `phi[j]` is the product of `1 - 2 c_i`
/// over `i >= j`, with a trailing constant `1`.
pub fn feature_transform(challenge: &Challenge) -> Vec<f64> {
    let n = challenge.len();
    let mut phi = vec![1.0; n + 1];
    for j in (0..n).rev() {
        let sign = if challenge.bit(j) { -1.0 } else { 1.0 };
        phi[j] = sign * phi[j + 1];
    }
    phi
}

/// Weights of the linear additive model, so that
/// `weights . feature_transform(c) == propagate(instance, c)`.
///
/// With `s_i` the straight skew and `k_i` the cross skew of stage `i`, write
/// `alpha_i = (s_i + k_i) / 2` and `gamma_i = (s_i - k_i) / 2`. Then
/// `w_0 = gamma_0`, `w_j = gamma_j + alpha_{j-1}` and `w_n = alpha_{n-1}`.
pub fn model_weights(instance: &PufInstance) -> Vec<f64> {
    let n = instance.n_stages();
    let mut weights = vec![0.0; n + 1];
    for (i, &(straight, cross)) in instance.skews.iter().enumerate() {
        weights[i] += (straight - cross) / 2.0;
        weights[i + 1] += (straight + cross) / 2.0;
    }
    weights
}

/// Evaluates the linear model.
pub fn linear_delay(weights: &[f64], phi: &[f64]) -> f64 {
    weights.iter().zip(phi).map(|(w, p)| w * p).sum()
}

/// A latch deciding which edge arrived first: 1 iff the top edge is strictly
/// earlier. An exact tie resolves to 0.
pub fn arbiter(t_top: f64, t_bottom: f64) -> u8 {
    u8::from(t_top < t_bottom)
}

/// Result of one evaluation through the paired arbiters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualArbiterOutcome {
    /// Arbiter A's output. Defined even when the outcome is invalid.
    pub bit: u8,
    pub valid: bool,
    /// Noisy delay difference `t_bottom - t_top` seen by both arbiters.
    pub delta: f64,
}

/// Resolves a noisy delay difference through the two offset arbiters.
///
/// Arbiter A has the top edge delayed by `offset`, arbiter B the bottom edge.
/// The output is valid only when both agree and the margin clears the offset.
pub fn resolve_arbiters(delta: f64, offset: f64) -> DualArbiterOutcome {
    // top edge at 0, bottom edge at delta
    let a = arbiter(offset, delta);
    let b = arbiter(0.0, delta + offset);
    DualArbiterOutcome {
        bit: a,
        valid: a == b && delta.abs() > offset,
        delta,
    }
}

/// One evaluation with an explicitly injected noise sample.
pub fn dual_arbiter_eval(
    instance: &PufInstance,
    challenge: &Challenge,
    noise: f64,
) -> Result<DualArbiterOutcome> {
    check_len(instance, challenge)?;
    let delta = instance.delay_difference(&challenge.words) + noise;
    Ok(resolve_arbiters(delta, instance.params.arbiter_offset))
}
