use serde::{Deserialize, Serialize};

/// Significance level used when a test is run outside a battery.
pub const DEFAULT_ALPHA: f64 = 0.01;

/// Result of one statistical test on one sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test_name: String,
    pub statistic: f64,
    pub p_values: Vec<f64>,
    pub pass: bool,
}

impl TestOutcome {
    pub(crate) fn new(test_name: &str, statistic: f64, p_values: Vec<f64>) -> Self {
        let p_values: Vec<f64> = p_values
            .into_iter()
            .map(|p| if p.is_nan() { 0.0 } else { p.clamp(0.0, 1.0) })
            .collect();
        let mut outcome = Self {
            test_name: test_name.to_string(),
            statistic,
            p_values,
            pass: false,
        };
        outcome.pass = outcome.passes(DEFAULT_ALPHA);
        outcome
    }

    /// First (often only) p-value.
    pub fn p_value(&self) -> f64 {
        self.p_values[0]
    }

    pub fn passes(&self, alpha: f64) -> bool {
        self.p_values.iter().all(|&p| p >= alpha)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.pass = self.passes(alpha);
        self
    }
}
