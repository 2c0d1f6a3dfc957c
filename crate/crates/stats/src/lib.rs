//! Randomness test battery: the core NIST SP 800-22 tests with pass-proportion
//! aggregation, plus the byte-level metrics reported by the `ent` tool.

pub mod battery;
pub mod ent;
pub mod error;
pub mod nist;
pub mod outcome;
pub mod sequence;
pub mod special;

pub use battery::{run_battery, BatteryConfig, BatteryReport, ProportionResult};
pub use ent::{ent_metrics, EntReport};
pub use error::{Result, StatError};
pub use outcome::{TestOutcome, DEFAULT_ALPHA};
pub use sequence::BitSequence;
