//! Closed-form stochastic-geometry results for a Poisson field of ALOHA
//! transmitters with Nakagami-m fading. Every function here is pure; the
//! estimators invert them and the tests use them as oracles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::nakagami_moment;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub density: f64,
    pub p: f64,
    pub m: f64,
    pub gamma: f64,
}

impl NetworkParams {
    pub fn new(density: f64, p: f64, m: f64, gamma: f64) -> Self {
        Self { density, p, m, gamma }
    }

    /// Density, ALOHA probability and fading shape only; `gamma` is checked by
    /// the callers that need it.
    fn validate_base(&self) -> Result<()> {
        if !(self.density > 0.0) {
            return Err(invalid(format!("density must be positive, got {}", self.density)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(invalid(format!("contention probability must lie in (0, 1], got {}", self.p)));
        }
        if !(self.m >= 0.5) {
            return Err(invalid(format!("Nakagami m must be at least 1/2, got {}", self.m)));
        }
        if !(self.gamma > 0.0) {
            return Err(invalid(format!("path loss exponent must be positive, got {}", self.gamma)));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_base()?;
        require_gamma_above_two(self.gamma)
    }

    /// Density of the transmitter process, λp.
    pub fn transmitter_density(&self) -> f64 {
        self.density * self.p
    }
}

fn require_gamma_above_two(gamma: f64) -> Result<()> {
    if gamma > 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("closed form requires gamma > 2, got {gamma}")))
    }
}

/// n-th cumulant of the interference from transmitters in the annulus `[a, b]`
/// around the receiver; `b = f64::INFINITY` gives the whole plane beyond `a`.
pub fn interference_cumulant(n: u32, params: &NetworkParams, a: f64, b: f64) -> Result<f64> {
    params.validate_base()?;
    if n == 0 {
        return Err(invalid("cumulant order must be positive"));
    }
    if !(a > 0.0) || !(b >= a) {
        return Err(invalid(format!("annulus needs 0 < a <= b, got a={a}, b={b}")));
    }
    let ng = n as f64 * params.gamma;
    let scale = 2.0 * PI * params.transmitter_density() * nakagami_moment(params.m, n as f64)?;
    if b.is_infinite() {
        if ng <= 2.0 {
            return Err(Error::Divergent(format!("cumulant {n} over an unbounded annulus needs n*gamma > 2")));
        }
        return Ok(scale * a.powf(2.0 - ng) / (ng - 2.0));
    }
    if a == b {
        return Ok(0.0);
    }
    if (ng - 2.0).abs() < 1e-12 {
        return Ok(scale * (b / a).ln());
    }
    Ok(scale * (b.powf(2.0 - ng) - a.powf(2.0 - ng)) / (2.0 - ng))
}

/// Mean interference beyond radius `a`: `2πλp a^{2-γ} / (γ-2)`.
pub fn mean_interference(params: &NetworkParams, a: f64) -> Result<f64> {
    interference_cumulant(1, params, a, f64::INFINITY)
}

/// The constant `c1 = λpπ E[G^{2/γ}] Γ(1 - 2/γ)` of the success probability at unit link distance.
pub fn success_constant(params: &NetworkParams) -> Result<f64> {
    params.validate()?;
    let delta = 2.0 / params.gamma;
    Ok(params.transmitter_density() * PI * nakagami_moment(params.m, delta)? * libm::tgamma(1.0 - delta))
}

/// `p_s ≈ exp(-c1 θ^{2/γ})` for a Rayleigh-faded unit-distance link.
pub fn success_probability(params: &NetworkParams, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(invalid(format!("threshold must be positive, got {theta}")));
    }
    let c1 = success_constant(params)?;
    Ok((-c1 * theta.powf(2.0 / params.gamma)).exp())
}

fn integer_m(m: f64) -> Result<u32> {
    if m >= 1.0 && m.fract() == 0.0 && m <= u32::MAX as f64 {
        Ok(m as u32)
    } else {
        Err(Error::Domain(format!("closed form requires a positive integer m, got {m}")))
    }
}

/// Success probability of a Nakagami-m link of length `r` (integer `m`),
/// `exp(-c2 r^2) Σ_{k<m} (c2 r^2)^k (2/γ)^k / k!` with `c2 = c1 (θ m)^{2/γ}`.
pub fn success_probability_at_distance(params: &NetworkParams, theta: f64, r: f64) -> Result<f64> {
    let m = integer_m(params.m)?;
    if !(theta > 0.0) || !(r >= 0.0) {
        return Err(invalid(format!("need theta > 0 and r >= 0, got theta={theta}, r={r}")));
    }
    let delta = 2.0 / params.gamma;
    let c2 = success_constant(params)? * (theta * params.m).powf(delta);
    let x = c2 * r * r;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..m {
        term *= x * delta / k as f64;
        sum += term;
    }
    Ok((-x).exp() * sum)
}

/// Laplace transform of the interference, `E[exp(-sI)] = exp(-λpπ E[G^{2/γ}] Γ(1-2/γ) s^{2/γ})`.
pub fn interference_laplace(params: &NetworkParams, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(invalid(format!("transform variable must be non-negative, got {s}")));
    }
    let c = success_constant(params)?;
    Ok((-c * s.powf(2.0 / params.gamma)).exp())
}

/// Mean cardinality of the transmitting set (integer `m`), independent of λ and p.
pub fn mean_transmitting_set_cardinality(m: u32, gamma: f64, theta: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m must be a positive integer".into()));
    }
    require_gamma_above_two(gamma)?;
    if !(theta > 0.0) {
        return Err(invalid(format!("threshold must be positive, got {theta}")));
    }
    let delta = 2.0 / gamma;
    let mf = m as f64;
    let log_ratio = libm::lgamma(mf) - libm::lgamma(mf + delta) - libm::lgamma(2.0 - delta);
    Ok(log_ratio.exp() * (1.0 - delta.powi(m as i32)) / theta.powf(delta))
}

/// Energy of `n` nearest-neighbor hops relative to one direct hop with the same expected progress.
pub fn energy_ratio(n: u32, gamma: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("hop count must be at least 1"));
    }
    if !(gamma > 0.0) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    let nf = n as f64;
    let n_prime = PI / 4.0 * (nf * nf - 1.0) + 1.0;
    let half = gamma / 2.0;
    let log = 2.0 * nf.ln() + libm::lgamma(1.0 + half) + libm::lgamma(n_prime) - libm::lgamma(n_prime + half);
    Ok(log.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> NetworkParams {
        NetworkParams::new(1.0, 0.05, 1.0, 4.0)
    }

    /// Midpoint rule for 2πλp ∫_a^b E[G^n] r^{1-nγ} dr on a log grid.
    fn cumulant_by_quadrature(n: u32, p: &NetworkParams, a: f64, b: f64) -> f64 {
        let steps = 200_000;
        let h = (b / a).ln() / steps as f64;
        let mut acc = 0.0;
        for i in 0..steps {
            let r = a * ((i as f64 + 0.5) * h).exp();
            acc += r.powf(1.0 - n as f64 * p.gamma) * r * h;
        }
        2.0 * PI * p.transmitter_density() * nakagami_moment(p.m, n as f64).unwrap() * acc
    }

    #[test]
    fn cumulant_examples() {
        let p = base();
        let mu = interference_cumulant(1, &p, 1.0, f64::INFINITY).unwrap();
        assert!((mu - 0.05 * PI).abs() < 1e-12);
        assert!((mu - cumulant_by_quadrature(1, &p, 1.0, 1e4)).abs() < 1e-6);
        let var = interference_cumulant(2, &p, 1.0, f64::INFINITY).unwrap();
        assert!((var - PI / 30.0).abs() < 1e-12);
        assert_eq!(interference_cumulant(1, &p, 1.0, 1.0).unwrap(), 0.0);

        let finite = interference_cumulant(1, &p, 1.0, 25.0).unwrap();
        assert!((finite - cumulant_by_quadrature(1, &p, 1.0, 25.0)).abs() < 1e-8);
        let g3 = NetworkParams { gamma: 3.0, m: 2.0, ..p };
        let c2 = interference_cumulant(2, &g3, 0.5, 7.0).unwrap();
        assert!((c2 / cumulant_by_quadrature(2, &g3, 0.5, 7.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cumulant_matches_closed_mean_and_variance() {
        for (m, gamma, a) in [(1.0f64, 3.0f64, 1.0f64), (2.0, 4.5, 0.7), (3.5, 2.5, 2.0)] {
            let p = NetworkParams { m, gamma, ..base() };
            let lp = p.transmitter_density();
            let mu = 2.0 * PI * lp * a.powf(2.0 - gamma) / (gamma - 2.0);
            let var = 2.0 * PI * lp * (1.0 + 1.0 / m) * a.powf(2.0 - 2.0 * gamma) / (2.0 * gamma - 2.0);
            assert!((interference_cumulant(1, &p, a, f64::INFINITY).unwrap() / mu - 1.0).abs() < 1e-12);
            assert!((interference_cumulant(2, &p, a, f64::INFINITY).unwrap() / var - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cumulant_divergence() {
        let p = NetworkParams { gamma: 2.0, ..base() };
        assert!(matches!(interference_cumulant(1, &p, 1.0, f64::INFINITY), Err(Error::Divergent(_))));
        assert!(interference_cumulant(1, &p, 1.0, 10.0).is_ok());
    }

    #[test]
    fn success_probability_examples() {
        let p = base();
        let c1 = success_constant(&p).unwrap();
        assert!((c1 - 0.025 * PI * PI).abs() < 1e-12);
        let ps = success_probability(&p, 1.0).unwrap();
        assert!((ps - (-0.025 * PI * PI).exp()).abs() < 1e-12);
        assert!((ps - 0.78135).abs() < 1e-5);
        assert!(success_probability(&p, 1e-12).unwrap() > 0.9999);
        let doubled = NetworkParams { density: 2.0, ..p };
        assert!((success_probability(&doubled, 3.0).unwrap() - success_probability(&p, 3.0).unwrap().powi(2)).abs() < 1e-12);
        assert!(success_probability(&NetworkParams { gamma: 2.0, ..p }, 1.0).is_err());
    }

    #[test]
    fn log_success_is_linear_in_log_threshold() {
        for gamma in [2.5, 3.0, 4.0, 5.5] {
            let p = NetworkParams { gamma, ..base() };
            let pts: Vec<(f64, f64)> = [0.1, 0.5, 1.0, 3.0, 10.0, 50.0]
                .iter()
                .map(|&t: &f64| (t.ln(), (-success_probability(&p, t).unwrap().ln()).ln()))
                .collect();
            let slope = (pts[5].1 - pts[0].1) / (pts[5].0 - pts[0].0);
            assert!((slope - 2.0 / gamma).abs() < 1e-12);
            for (x, y) in &pts {
                let fitted = pts[0].1 + slope * (x - pts[0].0);
                assert!((y - fitted).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn distance_form_consistency() {
        let p = base();
        for theta in [0.5, 1.0, 10.0] {
            let a = success_probability(&p, theta).unwrap();
            let b = success_probability_at_distance(&p, theta, 1.0).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
        assert!((success_probability_at_distance(&p, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let frac = NetworkParams { m: 1.5, ..p };
        assert!(matches!(success_probability_at_distance(&frac, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn laplace_examples() {
        let p = base();
        assert_eq!(interference_laplace(&p, 0.0).unwrap(), 1.0);
        let vals: Vec<f64> = [0.1, 0.5, 1.0, 2.0, 5.0].iter().map(|&s| interference_laplace(&p, s).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!((interference_laplace(&p, 1.0).unwrap() - success_probability(&p, 1.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn transmitting_set_examples() {
        let two_over_pi = 2.0 / PI;
        assert!((mean_transmitting_set_cardinality(1, 4.0, 1.0).unwrap() - two_over_pi).abs() < 1e-12);
        assert!((mean_transmitting_set_cardinality(2, 4.0, 1.0).unwrap() - two_over_pi).abs() < 1e-12);
        for gamma in [2.5, 3.0, 4.0] {
            let base_ratio = mean_transmitting_set_cardinality(1, gamma, 2.0).unwrap()
                / mean_transmitting_set_cardinality(1, gamma, 7.0).unwrap();
            assert!((base_ratio - (7.0f64 / 2.0).powf(2.0 / gamma)).abs() < 1e-12);
            for m in 1..=5 {
                let r = mean_transmitting_set_cardinality(m, gamma, 2.0).unwrap()
                    / mean_transmitting_set_cardinality(m, gamma, 7.0).unwrap();
                assert!((r - base_ratio).abs() < 1e-12);
            }
        }
        assert!(mean_transmitting_set_cardinality(0, 4.0, 1.0).is_err());
        assert!(mean_transmitting_set_cardinality(1, 2.0, 1.0).is_err());
    }

    #[test]
    fn transmitting_set_matches_its_series_form() {
        // λpπ/c2 Σ_{k<m} (2/γ)^k with c2 = c1 (θm)^{2/γ}
        for m in 1..=5u32 {
            for gamma in [2.5, 3.5, 4.5] {
                let theta = 3.0;
                let p = NetworkParams::new(1.0, 0.05, m as f64, gamma);
                let delta = 2.0 / gamma;
                let c2 = success_constant(&p).unwrap() * (theta * m as f64).powf(delta);
                let series: f64 = (0..m).map(|k| delta.powi(k as i32)).sum();
                let direct = p.transmitter_density() * PI / c2 * series;
                let closed = mean_transmitting_set_cardinality(m, gamma, theta).unwrap();
                assert!((direct / closed - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn energy_ratio_examples() {
        assert!((energy_ratio(1, 3.3).unwrap() - 1.0).abs() < 1e-12);
        let n_prime = 3.0 * PI / 4.0 + 1.0;
        assert!((energy_ratio(2, 2.0).unwrap() - 4.0 / n_prime).abs() < 1e-12);
        let sweep: Vec<f64> = (0..=40).map(|i| energy_ratio(2, 2.0 + 0.1 * i as f64).unwrap()).collect();
        // relaying pays off as the exponent grows
        assert!(sweep.windows(2).all(|w| w[1] < w[0]));
    }
}
