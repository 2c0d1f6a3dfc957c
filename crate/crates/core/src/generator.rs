//! PUF-driven nonlinear feedback shift register.
//!
//! Each clock presents the whole register as a challenge to the PUF. The
//! arbiter A output is XORed into the linear feedback and shifted in, whether
//! or not the dual-arbiter check passed. Only validated responses are
//! emitted as output bits.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bitstream::BitWriter;
use crate::error::{Error, Result};
use crate::puf::{self, DualArbiterOutcome, PufInstance, PufParameters};
use crate::register::{self, RegisterState, TapSet};

/// Source of per-evaluation arbiter noise.
pub trait NoiseSource {
    fn next_noise(&mut self) -> f64;
}

impl<F: FnMut() -> f64> NoiseSource for F {
    fn next_noise(&mut self) -> f64 {
        self()
    }
}

/// Gaussian noise from a seeded ChaCha20 stream.
#[derive(Clone, Debug)]
pub struct GaussianNoise {
    rng: ChaCha20Rng,
    normal: Normal<f64>,
}

impl GaussianNoise {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::Parameter(e.to_string()))?;
        Ok(Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            normal,
        })
    }
}

impl NoiseSource for GaussianNoise {
    fn next_noise(&mut self) -> f64 {
        self.normal.sample(&mut self.rng)
    }
}

fn default_max_evaluations() -> u64 {
    1000
}

/// Everything needed to reproduce a generated stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub puf_params: PufParameters,
    pub taps: TapSet,
    /// Initial register contents in hex, bit `i` of the value is register bit `i`.
    pub register_seed: String,
    pub noise_seed: u64,
    #[serde(default = "default_max_evaluations")]
    pub max_evaluations_per_bit: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            puf_params: PufParameters::default(),
            taps: TapSet::default_128(),
            register_seed: "0x1".into(),
            noise_seed: 0,
            max_evaluations_per_bit: default_max_evaluations(),
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        self.puf_params.validate()?;
        if self.taps.degree() != self.puf_params.n_stages {
            return Err(Error::Config(format!(
                "tap degree {} does not match {} PUF stages",
                self.taps.degree(),
                self.puf_params.n_stages
            )));
        }
        if self.max_evaluations_per_bit == 0 {
            return Err(Error::Config(
                "max_evaluations_per_bit must be positive".into(),
            ));
        }
        self.initial_state().map(|_| ())
    }

    pub fn initial_state(&self) -> Result<RegisterState> {
        RegisterState::from_hex(self.taps.degree(), &self.register_seed)
    }

    /// SHA-256 over the compact JSON encoding, hex encoded.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}

/// Counters collected while generating.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub evaluations: u64,
    pub valid_bits: u64,
    pub validity_rate: f64,
}

impl GenerationStats {
    fn finish(evaluations: u64, valid_bits: u64) -> Self {
        let validity_rate = if evaluations == 0 {
            0.0
        } else {
            valid_bits as f64 / evaluations as f64
        };
        Self {
            evaluations,
            valid_bits,
            validity_rate,
        }
    }
}

/// Generated output, packed MSB-first.
#[derive(Clone, Debug, PartialEq)]
pub struct BitStream {
    pub bytes: Vec<u8>,
    pub length_bits: u64,
    pub stats: GenerationStats,
}

impl BitStream {
    /// Bit `i` of the stream.
    pub fn bit(&self, i: u64) -> u8 {
        assert!(i < self.length_bits);
        (self.bytes[(i / 8) as usize] >> (7 - i % 8)) & 1
    }

    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.length_bits).map(|i| self.bit(i))
    }
}

/// What happened on one clock.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub arbiters: DualArbiterOutcome,
    pub feedback: bool,
    /// The output bit, present only when the arbiters agreed.
    pub emitted: Option<u8>,
}

/// A running generator bound to one PUF instance.
pub struct Nfsr<'a, N> {
    instance: &'a PufInstance,
    taps: TapSet,
    state: RegisterState,
    noise: N,
}

impl<'a, N: NoiseSource> Nfsr<'a, N> {
    pub fn new(
        instance: &'a PufInstance,
        taps: TapSet,
        state: RegisterState,
        noise: N,
    ) -> Result<Self> {
        if taps.degree() != instance.n_stages() {
            return Err(Error::Config(format!(
                "tap degree {} does not match {} PUF stages",
                taps.degree(),
                instance.n_stages()
            )));
        }
        if state.degree() != taps.degree() {
            return Err(Error::Dimension {
                expected: taps.degree(),
                actual: state.degree(),
            });
        }
        Ok(Self {
            instance,
            taps,
            state,
            noise,
        })
    }

    pub fn state(&self) -> &RegisterState {
        &self.state
    }

    pub fn step(&mut self) -> StepOutcome {
        let delta = self.instance.delay_difference(self.state.words()) + self.noise.next_noise();
        let arbiters = puf::resolve_arbiters(delta, self.instance.params().arbiter_offset);
        let feedback = register::feedback_unchecked(&self.state, &self.taps) ^ (arbiters.bit == 1);
        self.state.shift_in(feedback);
        StepOutcome {
            arbiters,
            feedback,
            emitted: arbiters.valid.then_some(arbiters.bit),
        }
    }
}

/// Single clock of the generator as a pure function of its inputs.
pub fn nfsr_step(
    state: &RegisterState,
    instance: &PufInstance,
    taps: &TapSet,
    noise: &mut impl NoiseSource,
) -> Result<(RegisterState, Option<u8>)> {
    let mut nfsr = Nfsr::new(instance, taps.clone(), state.clone(), || noise.next_noise())?;
    let outcome = nfsr.step();
    Ok((nfsr.state, outcome.emitted))
}

/// Samples the PUF described by `config` and generates `n_bits` output bits.
pub fn generate(config: &GeneratorConfig, n_bits: u64) -> Result<BitStream> {
    config.validate()?;
    let instance = puf::sample_puf(&config.puf_params)?;
    generate_with_instance(&instance, config, n_bits)
}

/// Generates from an existing instance, which must match `config.puf_params`.
pub fn generate_with_instance(
    instance: &PufInstance,
    config: &GeneratorConfig,
    n_bits: u64,
) -> Result<BitStream> {
    config.validate()?;
    if instance.params() != &config.puf_params {
        return Err(Error::Config(
            "instance parameters differ from the generator configuration".into(),
        ));
    }
    if n_bits == 0 {
        return Err(Error::Parameter("n_bits must be at least 1".into()));
    }
    let noise = GaussianNoise::new(config.puf_params.sigma_noise, config.noise_seed)?;
    let mut nfsr = Nfsr::new(
        instance,
        config.taps.clone(),
        config.initial_state()?,
        noise,
    )?;

    let budget = n_bits.saturating_mul(config.max_evaluations_per_bit);
    let mut writer = BitWriter::with_capacity_bits(n_bits);
    let mut evaluations = 0u64;
    while writer.len_bits() < n_bits {
        if evaluations >= budget {
            return Err(Error::Starvation {
                requested: n_bits,
                emitted: writer.len_bits(),
                evaluations,
            });
        }
        evaluations += 1;
        if let Some(bit) = nfsr.step().emitted {
            writer.push(bit == 1);
        }
    }
    let length_bits = writer.len_bits();
    Ok(BitStream {
        bytes: writer.into_bytes(),
        length_bits,
        stats: GenerationStats::finish(evaluations, length_bits),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puf::sample_puf;

    fn small_config(n: usize, taps: &[usize]) -> GeneratorConfig {
        GeneratorConfig {
            puf_params: PufParameters {
                n_stages: n,
                ..Default::default()
            },
            taps: TapSet::new(taps.iter().copied()).unwrap(),
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(GeneratorConfig::default().validate().is_ok());
        let mut c = small_config(8, &[4, 3]);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c = small_config(4, &[4, 3]);
        c.register_seed = "0".into();
        assert!(c.validate().is_err());
        c.register_seed = "1".into();
        c.max_evaluations_per_bit = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_roundtrip_and_digest() {
        let c = GeneratorConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        let back: GeneratorConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.digest(), back.digest());
        let mut other = c.clone();
        other.noise_seed = 1;
        assert_ne!(c.digest(), other.digest());
    }

    #[test]
    fn zero_bits_rejected() {
        assert!(generate(&GeneratorConfig::default(), 0).is_err());
    }

    #[test]
    fn mismatched_instance_rejected() {
        let config = GeneratorConfig::default();
        let mut params = config.puf_params.clone();
        params.instance_seed += 1;
        let other = sample_puf(&params).unwrap();
        assert!(matches!(
            generate_with_instance(&other, &config, 8),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn degenerate_puf_starves() {
        let mut config = GeneratorConfig::default();
        config.puf_params.sigma_process = 0.0;
        config.puf_params.sigma_noise = 0.0;
        config.max_evaluations_per_bit = 3;
        match generate(&config, 10) {
            Err(Error::Starvation {
                requested,
                emitted,
                evaluations,
            }) => {
                assert_eq!((requested, emitted, evaluations), (10, 0, 30));
            }
            other => panic!("expected starvation, got {other:?}"),
        }
    }

    #[test]
    fn stats_are_consistent() {
        let stream = generate(&GeneratorConfig::default(), 10_000).unwrap();
        assert_eq!(stream.length_bits, 10_000);
        assert_eq!(stream.bytes.len(), 1250);
        assert_eq!(stream.stats.valid_bits, 10_000);
        assert!(stream.stats.evaluations >= stream.stats.valid_bits);
        assert!(stream.stats.validity_rate > 0.0 && stream.stats.validity_rate <= 1.0);
    }

    #[test]
    fn partial_byte_is_zero_padded() {
        let stream = generate(&GeneratorConfig::default(), 13).unwrap();
        assert_eq!(stream.bytes.len(), 2);
        assert_eq!(stream.bytes[1] & 0b0000_0111, 0);
    }

    #[test]
    fn injected_noise_drives_validity() {
        let config = small_config(4, &[4, 3]);
        let instance = sample_puf(&config.puf_params).unwrap();
        let state = config.initial_state().unwrap();
        let delta0 = puf::propagate(&instance, &state.challenge()).unwrap();
        // noise that parks the race exactly at zero margin
        let mut park = || -delta0;
        let (next, emitted) = nfsr_step(&state, &instance, &config.taps, &mut park).unwrap();
        assert_eq!(emitted, None);
        // arbiter A reads 0 at a tie, so feedback is the pure linear term
        let linear = register::lfsr_feedback(&state, &config.taps).unwrap();
        assert_eq!(next.bit(0), linear);
        assert_eq!(next.step_count(), 1);
    }

    #[test]
    fn step_shifts_challenge() {
        let config = GeneratorConfig::default();
        let instance = sample_puf(&config.puf_params).unwrap();
        let noise = GaussianNoise::new(0.05, 3).unwrap();
        let mut nfsr = Nfsr::new(
            &instance,
            config.taps.clone(),
            config.initial_state().unwrap(),
            noise,
        )
        .unwrap();
        for _ in 0..500 {
            let before = nfsr.state().clone();
            let out = nfsr.step();
            let after = nfsr.state();
            for i in 1..128 {
                assert_eq!(after.bit(i), before.bit(i - 1));
            }
            assert_eq!(after.bit(0), out.feedback);
            if let Some(b) = out.emitted {
                assert_eq!(b == 1, out.arbiters.delta > 0.0);
            }
        }
    }

    #[test]
    fn nfsr_rejects_mismatched_register() {
        let config = small_config(4, &[4, 3]);
        let instance = sample_puf(&config.puf_params).unwrap();
        let wide = RegisterState::unit(5).unwrap();
        assert!(Nfsr::new(&instance, config.taps.clone(), wide, || 0.0).is_err());
        let taps7 = TapSet::new([7, 6]).unwrap();
        assert!(Nfsr::new(&instance, taps7, RegisterState::unit(7).unwrap(), || 0.0).is_err());
    }
}
