//! Checks with machine-readable reports.
//!
//! Exact checks compare rationals for equality; Monte Carlo checks compare
//! an empirical table with the exact one in total variation. A failing
//! report always carries a witness.

mod ep_scan;
mod exact;
mod montecarlo;
mod suite;

use serde::Serialize;
use serde_json::{Map, Value};

pub use ep_scan::{ep_family_scan, fit_one_block, EpFit};
pub use exact::{
    check_closed_vs_product, check_consistency, check_consistency_tables, check_limit_theorem3,
    check_normalization, check_normalization_with, check_symmetry,
};
pub use montecarlo::{
    calibrated_tolerance, coupled_subordinator_counts, epsilon_sweep, mc_goodness_of_fit,
    monte_carlo_counts, truncation_bias_sweep, MC_CHUNKS,
};
pub use suite::{default_models, exact_suite, monte_carlo_suite, suite_passes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

/// Concrete evidence attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Total mass of the table of weight `n`.
    Mass {
        n: usize,
        total: String,
    },
    /// A composition where two routes disagree.
    Cell {
        n: usize,
        parts: Vec<usize>,
        got: String,
        expected: String,
    },
    /// Two rearrangements of the same parts with different probabilities.
    Asymmetry {
        first: Vec<usize>,
        first_value: String,
        second: Vec<usize>,
        second_value: String,
    },
    /// Worst decrement-matrix cell in a limit comparison.
    Decrement {
        alpha: String,
        n: usize,
        m: usize,
        deviation: f64,
    },
    /// Worst cell of a Monte Carlo comparison.
    Frequency {
        parts: Vec<usize>,
        empirical: f64,
        exact: f64,
        tv: f64,
    },
    /// Fitted parameters and the residual at the test weight.
    Fit {
        alpha: f64,
        theta: f64,
        n_test: usize,
        residual: f64,
    },
    Message {
        text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    /// Regression checks documenting a known-bad formula are expected to
    /// fail; their failure counts as success for the suite.
    pub expected_fail: bool,
    pub witness: Option<Witness>,
    pub margin: Option<f64>,
    pub details: Map<String, Value>,
}

impl CheckReport {
    pub fn pass(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Pass,
            expected_fail: false,
            witness: None,
            margin: None,
            details: Map::new(),
        }
    }

    pub fn fail(name: impl Into<String>, witness: Witness) -> Self {
        Self {
            status: Status::Fail,
            witness: Some(witness),
            ..Self::pass(name)
        }
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = Some(margin);
        self
    }

    pub fn with_detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn expecting_failure(mut self) -> Self {
        self.expected_fail = true;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Whether the outcome is the one the suite expects.
    pub fn ok(&self) -> bool {
        self.passed() != self.expected_fail
    }
}
