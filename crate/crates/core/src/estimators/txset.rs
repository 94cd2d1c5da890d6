use super::{require_measurements, Algorithm, PleEstimate, ThresholdPair};
use crate::error::{invalid, Error, Result};
use crate::simcore::{strongest_decodable, SlotMeasurement};

/// Empirical mean transmitting-set cardinalities at both thresholds (each ≥ 1,
/// so the cardinality per slot is 0 or 1).
pub fn transmitting_set_means(measurements: &[SlotMeasurement], thresholds: ThresholdPair) -> Result<(f64, f64)> {
    require_measurements(measurements)?;
    require_unit_or_more(thresholds)?;
    let n = measurements.len() as f64;
    let mut hits = (0usize, 0usize);
    for m in measurements {
        hits.0 += strongest_decodable(m, thresholds.theta1)? as usize;
        hits.1 += strongest_decodable(m, thresholds.theta2)? as usize;
    }
    Ok((hits.0 as f64 / n, hits.1 as f64 / n))
}

fn require_unit_or_more(thresholds: ThresholdPair) -> Result<()> {
    thresholds.validate()?;
    if thresholds.theta1 < 1.0 || thresholds.theta2 < 1.0 {
        return Err(invalid("transmitting-set thresholds must both be at least 1"));
    }
    Ok(())
}

/// `γ = 2 ln(θ2/θ1) / ln(N̄1/N̄2)`; needs neither the density nor m.
pub fn estimate_ple_transmitting_set(
    means: (f64, f64),
    thresholds: ThresholdPair,
    n_slots: usize,
) -> Result<PleEstimate> {
    require_unit_or_more(thresholds)?;
    let (n1, n2) = means;
    if !(n1 > 0.0 && n2 > 0.0) {
        return Err(Error::InsufficientData(format!("no decodable transmitter at one threshold ({n1}, {n2})")));
    }
    if n1 == n2 {
        return Err(Error::InsufficientData("equal cardinalities at both thresholds".into()));
    }
    let gamma = 2.0 * (thresholds.theta2 / thresholds.theta1).ln() / (n1 / n2).ln();
    if !(gamma > 0.0) {
        return Err(Error::InconsistentData(format!("cardinalities {n1} and {n2} are not ordered like their thresholds")));
    }
    Ok(PleEstimate::new(gamma, Algorithm::TransmittingSet, n_slots)
        .with("mean_cardinality_1", n1)
        .with("mean_cardinality_2", n2)
        .with("theta1", thresholds.theta1)
        .with("theta2", thresholds.theta2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::mean_transmitting_set_cardinality;
    use proptest::prelude::*;

    fn pair() -> ThresholdPair {
        ThresholdPair { theta1: 10.0, theta2: 1.0 }
    }

    #[test]
    fn exact_cardinalities() {
        let n1 = mean_transmitting_set_cardinality(3, 3.5, 10.0).unwrap();
        let n2 = mean_transmitting_set_cardinality(3, 3.5, 1.0).unwrap();
        assert!((estimate_ple_transmitting_set((n1, n2), pair(), 1).unwrap().gamma_hat - 3.5).abs() < 1e-12);
        let e = estimate_ple_transmitting_set((0.2 * 0.1f64.sqrt(), 0.2), pair(), 1).unwrap();
        assert!((e.gamma_hat - 4.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(estimate_ple_transmitting_set((0.0, 0.3), pair(), 1), Err(Error::InsufficientData(_))));
        assert!(matches!(estimate_ple_transmitting_set((0.3, 0.3), pair(), 1), Err(Error::InsufficientData(_))));
        assert!(matches!(estimate_ple_transmitting_set((0.4, 0.3), pair(), 1), Err(Error::InconsistentData(_))));
        let low = ThresholdPair { theta1: 10.0, theta2: 0.5 };
        assert!(matches!(estimate_ple_transmitting_set((0.1, 0.3), low, 1), Err(Error::InvalidParameter(_))));
        assert_eq!(transmitting_set_means(&[], pair()), Err(Error::EmptyInput));
    }

    #[test]
    fn counts_decodable_slots() {
        let ms = vec![
            SlotMeasurement::from_components(0.0, vec![(0, 1.0), (1, 0.05)]),
            SlotMeasurement::from_components(0.0, vec![(0, 1.0), (1, 0.5)]),
            SlotMeasurement::from_components(0.1, vec![]),
            SlotMeasurement::from_components(0.0, vec![(0, 1.0), (1, 1.0)]),
        ];
        assert_eq!(transmitting_set_means(&ms, pair()).unwrap(), (0.25, 0.5));
    }

    proptest! {
        #[test]
        fn round_trip_is_independent_of_m(step in 0u32..=39) {
            let gamma = 2.1 + 0.1 * step as f64;
            let first = {
                let n1 = mean_transmitting_set_cardinality(1, gamma, 10.0).unwrap();
                let n2 = mean_transmitting_set_cardinality(1, gamma, 1.0).unwrap();
                estimate_ple_transmitting_set((n1, n2), pair(), 1).unwrap().gamma_hat
            };
            prop_assert!((first - gamma).abs() < 1e-9);
            for m in 2..=5 {
                let n1 = mean_transmitting_set_cardinality(m, gamma, 10.0).unwrap();
                let n2 = mean_transmitting_set_cardinality(m, gamma, 1.0).unwrap();
                let g = estimate_ple_transmitting_set((n1, n2), pair(), 1).unwrap().gamma_hat;
                prop_assert!((g - first).abs() < 1e-12);
            }
        }
    }
}
