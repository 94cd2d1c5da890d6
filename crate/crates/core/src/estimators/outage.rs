use rand::Rng;

use super::{Algorithm, PleEstimate, ThresholdPair};
use crate::error::{Error, Result};
use crate::simcore::SlotMeasurement;

/// One virtual SIR per slot: a unit-mean exponential "signal" over the measured
/// received power. With `subtract_noise = Some(n0)` the denominator is the
/// interference `R - n0` instead; a slot with no interference then yields `+inf`.
pub fn virtual_sir_samples<R: Rng + ?Sized>(
    measurements: &[SlotMeasurement],
    subtract_noise: Option<f64>,
    rng: &mut R,
) -> Vec<f64> {
    let n0 = subtract_noise.unwrap_or(0.0);
    measurements
        .iter()
        .map(|m| {
            let s = -(1.0 - rng.random::<f64>()).ln();
            let r = (m.total_received_power - n0).max(0.0);
            s / r
        })
        .collect()
}

/// Fraction of samples strictly above `theta`.
pub fn empirical_success_probability(sirs: &[f64], theta: f64) -> f64 {
    sirs.iter().filter(|&&s| s > theta).count() as f64 / sirs.len() as f64
}

/// `γ = 2 ln(θ1/θ2) / ln(ln p1 / ln p2)` for success probabilities at two thresholds.
pub fn invert_success_probabilities(ps1: f64, ps2: f64, thresholds: ThresholdPair) -> Result<f64> {
    thresholds.validate()?;
    for ps in [ps1, ps2] {
        if !(ps > 0.0 && ps < 1.0) {
            return Err(Error::InsufficientData(format!("success probability {ps} is degenerate")));
        }
    }
    let log_ratio = (ps1.ln() / ps2.ln()).ln();
    let gamma = 2.0 * (thresholds.theta1 / thresholds.theta2).ln() / log_ratio;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InconsistentData(format!(
            "success probabilities {ps1} and {ps2} are not ordered like their thresholds"
        )));
    }
    Ok(gamma)
}

/// Two-threshold estimator on virtual SIR samples.
pub fn estimate_ple_virtual_outage(sirs: &[f64], thresholds: ThresholdPair) -> Result<PleEstimate> {
    if sirs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ps1 = empirical_success_probability(sirs, thresholds.theta1);
    let ps2 = empirical_success_probability(sirs, thresholds.theta2);
    let gamma = invert_success_probabilities(ps1, ps2, thresholds)?;
    Ok(PleEstimate::new(gamma, Algorithm::VirtualOutage, sirs.len())
        .with("ps1", ps1)
        .with("ps2", ps2)
        .with("theta1", thresholds.theta1)
        .with("theta2", thresholds.theta2))
}
