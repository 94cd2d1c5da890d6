//! Interference-field simulation on planar point processes, closed-form
//! stochastic-geometry results and three distributed estimators of the
//! path loss exponent that work from received-power measurements alone.
//!
//! Module map:
//!
//! * [`pointproc`] samples node patterns (PPP, lattice, Matérn II, Thomas) and
//!   moves them under random-walk mobility.
//! * [`channel`] holds Nakagami-m power fading and the path loss models.
//! * [`simcore`] runs slotted-ALOHA snapshots and records what an observer node hears.
//! * [`theory`] evaluates the closed forms used both by the estimators and as test oracles.
//! * [`estimators`] turns measurement sets into exponent estimates.
//! * [`experiments`] is the Monte Carlo harness producing relative-MSE reports.

pub mod channel;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod optim;
pub mod pointproc;
pub mod rng;
pub mod simcore;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};

/// Converts a power level in dB (or dBm relative to a 0 dBm reference) to linear units.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_floor_conversion() {
        assert!((db_to_linear(-25.0) - 3.162_277_660_168_379e-3).abs() < 1e-15);
        assert!((linear_to_db(db_to_linear(10.0)) - 10.0).abs() < 1e-12);
    }
}
