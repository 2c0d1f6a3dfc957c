//! The core SP 800-22 tests. Each function takes a sequence plus its
//! parameters and fails with a length error below the test's minimum.

mod complexity;
mod cusum;
mod entropy;
mod frequency;
mod rank;
mod runs;
mod spectral;

pub use complexity::{berlekamp_massey, linear_complexity, linear_complexity_with};
pub use cusum::{cumulative_sums, excursion_p_value, max_excursion};
pub use entropy::{approximate_entropy, cyclic_pattern_counts, serial, MAX_PATTERN_BITS};
pub use frequency::{block_frequency, frequency_monobit};
pub use rank::{binary_matrix_rank, gf2_rank, rank_probability};
pub use runs::{longest_run_of_ones, runs};
pub use spectral::{dft_magnitudes, dft_spectral};
