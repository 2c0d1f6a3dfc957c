//! Software model of an arbiter-PUF based true random number generator.
//!
//! A simulated arbiter PUF ([`puf`]) is driven by the parallel state of a
//! 128-stage shift register ([`register`]). The PUF response is folded into
//! the register's linear feedback, turning it into a nonlinear feedback shift
//! register, and a pair of offset arbiters decides which responses are stable
//! enough to emit ([`generator`]). Emitted streams are stored as packed bytes
//! with a JSON sidecar ([`bitstream`]).

pub mod bitstream;
pub mod error;
pub mod generator;
pub mod puf;
pub mod register;

pub use error::{Error, Result};
pub use generator::{
    generate, generate_with_instance, nfsr_step, BitStream, GaussianNoise, GenerationStats,
    GeneratorConfig, Nfsr, NoiseSource, StepOutcome,
};
pub use puf::{
    arbiter, dual_arbiter_eval, feature_transform, linear_delay, model_weights, propagate,
    sample_puf, Challenge, DualArbiterOutcome, PufInstance, PufParameters, StageDelays,
};
pub use register::{lfsr_feedback, lfsr_period, RegisterState, TapSet};
