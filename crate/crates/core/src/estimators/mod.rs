//! Distributed path-loss-exponent estimators.
//!
//! Every entry point consumes measurement values and publicly known network
//! parameters only; none of them sees node coordinates.

mod ks;
mod mean;
mod outage;
mod txset;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::simcore::{SlotMeasurement, SlotTrace};

pub use ks::{estimate_ple_ks_fit, KsFitOptions};
pub use mean::{
    estimate_nakagami_m, estimate_ple_mean_interference, invert_mean_interference, invert_nakagami_variance,
    MeanInterferenceInputs,
};
pub use outage::{empirical_success_probability, estimate_ple_virtual_outage, invert_success_probabilities, virtual_sir_samples};
pub use txset::{estimate_ple_transmitting_set, transmitting_set_means};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Inverts the mean received power (needs density and p).
    MeanInterference,
    /// Two-threshold virtual outage on synthetic SIRs.
    VirtualOutage,
    /// Kolmogorov-Smirnov fit of the virtual SIR distribution.
    KsFit,
    /// Ratio of mean transmitting-set cardinalities at two thresholds.
    TransmittingSet,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Self::MeanInterference, Self::VirtualOutage, Self::KsFit, Self::TransmittingSet];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::MeanInterference => "mean",
            Self::VirtualOutage => "outage",
            Self::KsFit => "ks",
            Self::TransmittingSet => "txset",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.as_str() == s)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PleEstimate {
    pub gamma_hat: f64,
    pub m_hat: Option<f64>,
    pub algorithm: Algorithm,
    pub n_slots_used: usize,
    /// The solution sits on a search bound rather than at an interior root.
    pub boundary: bool,
    pub diagnostics: BTreeMap<String, f64>,
}

impl PleEstimate {
    fn new(gamma_hat: f64, algorithm: Algorithm, n_slots_used: usize) -> Self {
        Self { gamma_hat, m_hat: None, algorithm, n_slots_used, boundary: false, diagnostics: BTreeMap::new() }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }
}

/// Range searched by the iterative inversions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub gamma_min: f64,
    pub gamma_max: f64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self { gamma_min: 2.05, gamma_max: 8.0 }
    }
}

impl SearchBounds {
    pub fn validate(&self) -> Result<()> {
        if self.gamma_min > 2.0 && self.gamma_max > self.gamma_min && self.gamma_max.is_finite() {
            Ok(())
        } else {
            Err(invalid(format!("search bounds must satisfy 2 < min < max, got [{}, {}]", self.gamma_min, self.gamma_max)))
        }
    }
}

/// Linear SINR thresholds for the two-threshold estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPair {
    pub theta1: f64,
    pub theta2: f64,
}

impl Default for ThresholdPair {
    /// 10 dB and 0 dB.
    fn default() -> Self {
        Self { theta1: 10.0, theta2: 1.0 }
    }
}

impl ThresholdPair {
    pub fn from_db(theta1_db: f64, theta2_db: f64) -> Self {
        Self { theta1: crate::db_to_linear(theta1_db), theta2: crate::db_to_linear(theta2_db) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta1 > 0.0 && self.theta2 > 0.0) || !self.theta1.is_finite() || !self.theta2.is_finite() {
            return Err(invalid(format!("thresholds must be positive, got {} and {}", self.theta1, self.theta2)));
        }
        if self.theta1 == self.theta2 {
            return Err(invalid("the two thresholds must differ"));
        }
        Ok(())
    }
}

/// Concatenates the traces of distinct observers in one realization into a
/// single measurement set. By ergodicity the spatial average over observers
/// estimates the same quantities as a time average at one node.
pub fn pool_measurements(traces: &[SlotTrace]) -> Result<Vec<SlotMeasurement>> {
    if traces.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut seen = BTreeSet::new();
    for t in traces {
        if !seen.insert(t.observer) {
            return Err(Error::DuplicateObserver(t.observer));
        }
    }
    Ok(traces.iter().flat_map(|t| t.measurements.iter().cloned()).collect())
}

fn require_measurements(measurements: &[SlotMeasurement]) -> Result<()> {
    if measurements.is_empty() {
        Err(Error::EmptyInput)
    } else {
        Ok(())
    }
}
