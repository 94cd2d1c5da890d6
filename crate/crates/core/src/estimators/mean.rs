use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{require_measurements, Algorithm, PleEstimate, SearchBounds};
use crate::error::{invalid, Error, Result};
use crate::optim::bisect;
use crate::simcore::SlotMeasurement;
use crate::stats::{mean, sample_variance};

/// Public knowledge the mean-interference estimator relies on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanInterferenceInputs {
    pub density: f64,
    pub p: f64,
    pub noise_power: f64,
    /// Radius of the interference-free zone around the receiver (A0).
    pub near_field_radius: f64,
}

impl MeanInterferenceInputs {
    fn validate(&self) -> Result<()> {
        if !(self.density > 0.0) || !(self.p > 0.0 && self.p <= 1.0) {
            return Err(invalid(format!("need density > 0 and p in (0, 1], got {} and {}", self.density, self.p)));
        }
        if !(self.noise_power >= 0.0) || !(self.near_field_radius > 0.0) {
            return Err(invalid("noise power must be non-negative and A0 positive"));
        }
        Ok(())
    }

    /// Theoretical mean received power `N0 + 2πλp A0^{2-γ} / (γ-2)`.
    fn model(&self, gamma: f64) -> f64 {
        self.noise_power
            + 2.0 * PI * self.density * self.p * self.near_field_radius.powf(2.0 - gamma) / (gamma - 2.0)
    }
}

const GRID_STEP: f64 = 1e-3;
const ROOT_TOL: f64 = 1e-12;

/// Solves `model(γ) = r_bar` on the search interval.
pub fn invert_mean_interference(
    r_bar: f64,
    n_slots: usize,
    inputs: &MeanInterferenceInputs,
    bounds: SearchBounds,
) -> Result<PleEstimate> {
    inputs.validate()?;
    bounds.validate()?;
    if !(r_bar > inputs.noise_power) {
        return Err(Error::NoInterference { mean: r_bar, noise: inputs.noise_power });
    }
    let (lo, hi) = (bounds.gamma_min, bounds.gamma_max);
    let g = |gamma: f64| inputs.model(gamma) - r_bar;

    let (gamma_hat, boundary) = if inputs.near_field_radius == 1.0 {
        // strictly decreasing in γ
        if g(lo) <= 0.0 {
            (lo, g(lo) < 0.0)
        } else if g(hi) >= 0.0 {
            (hi, g(hi) > 0.0)
        } else {
            (bisect(g, lo, hi, ROOT_TOL).expect("bracketed root"), false)
        }
    } else {
        let steps = ((hi - lo) / GRID_STEP).ceil() as usize;
        let at = |i: usize| (lo + i as f64 * GRID_STEP).min(hi);
        let best = (0..=steps)
            .min_by(|&a, &b| g(at(a)).abs().total_cmp(&g(at(b)).abs()))
            .expect("non-empty grid");
        let mut refined = None;
        for (a, b) in [(best.saturating_sub(1), best), (best, (best + 1).min(steps))] {
            if a != b && g(at(a)) * g(at(b)) <= 0.0 {
                refined = bisect(g, at(a), at(b), ROOT_TOL);
                break;
            }
        }
        match refined {
            Some(root) => (root, false),
            None => (at(best), best == 0 || best == steps),
        }
    };

    let mut est = PleEstimate::new(gamma_hat, Algorithm::MeanInterference, n_slots)
        .with("mean_received_power", r_bar)
        .with("residual", g(gamma_hat));
    est.boundary = boundary;
    Ok(est)
}

/// Equates the empirical mean received power to its closed form and solves for γ.
pub fn estimate_ple_mean_interference(
    measurements: &[SlotMeasurement],
    inputs: &MeanInterferenceInputs,
    bounds: SearchBounds,
) -> Result<PleEstimate> {
    require_measurements(measurements)?;
    let totals: Vec<f64> = measurements.iter().map(|m| m.total_received_power).collect();
    invert_mean_interference(mean(&totals), measurements.len(), inputs, bounds)
}

/// Inverts the interference variance `πλp(1 + 1/m) A0^{2-2γ} / (γ-1)` for m.
pub fn invert_nakagami_variance(interference_variance: f64, gamma_hat: f64, density: f64, p: f64, a0: f64) -> Result<f64> {
    if !(gamma_hat > 1.0) || !(density > 0.0) || !(p > 0.0) || !(a0 > 0.0) {
        return Err(invalid("need gamma > 1 and positive density, p and A0"));
    }
    if !(interference_variance > 0.0) {
        return Err(Error::InsufficientData(format!(
            "received-power variance does not exceed the noise variance (excess {interference_variance})"
        )));
    }
    let bracket = interference_variance * (gamma_hat - 1.0) / (PI * density * p * a0.powf(2.0 - 2.0 * gamma_hat)) - 1.0;
    if !(bracket > 0.0) {
        return Err(Error::InvalidFadingEstimate(bracket));
    }
    Ok(1.0 / bracket)
}

/// Estimates the Nakagami parameter from the empirical received-power variance.
pub fn estimate_nakagami_m(
    measurements: &[SlotMeasurement],
    gamma_hat: f64,
    density: f64,
    p: f64,
    a0: f64,
    noise_variance: f64,
) -> Result<f64> {
    require_measurements(measurements)?;
    let totals: Vec<f64> = measurements.iter().map(|m| m.total_received_power).collect();
    invert_nakagami_variance(sample_variance(&totals) - noise_variance, gamma_hat, density, p, a0)
}
