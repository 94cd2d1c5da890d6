//! Nakagami-m power fading and deterministic path loss.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pointproc::Point;

/// Nakagami shape of the amplitude fading. The power gain `G = H^2` is
/// Gamma distributed with shape `m` and unit mean; `m = +inf` means no fading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingParams {
    pub m: f64,
}

impl FadingParams {
    pub fn new(m: f64) -> Result<Self> {
        let f = Self { m };
        f.validate()?;
        Ok(f)
    }

    pub fn rayleigh() -> Self {
        Self { m: 1.0 }
    }

    pub fn none() -> Self {
        Self { m: f64::INFINITY }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m >= 0.5 {
            Ok(())
        } else {
            Err(invalid(format!("Nakagami m must be at least 1/2, got {}", self.m)))
        }
    }
}

/// Reusable sampler for the power fading gain.
#[derive(Debug, Clone, Copy)]
pub struct FadingSampler {
    gamma: Option<Gamma<f64>>,
}

impl FadingSampler {
    pub fn new(params: FadingParams) -> Result<Self> {
        params.validate()?;
        if params.m.is_infinite() {
            return Ok(Self { gamma: None });
        }
        let gamma = Gamma::new(params.m, 1.0 / params.m).map_err(|e| invalid(e.to_string()))?;
        Ok(Self { gamma: Some(gamma) })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.gamma {
            Some(g) => g.sample(rng),
            None => 1.0,
        }
    }
}

/// One draw of the power fading gain `G`.
pub fn nakagami_power_sample<R: Rng + ?Sized>(params: FadingParams, rng: &mut R) -> Result<f64> {
    Ok(FadingSampler::new(params)?.sample(rng))
}

/// `E[G^n] = Γ(m+n) / (m^n Γ(m))`, evaluated in log space.
pub fn nakagami_moment(m: f64, n: f64) -> Result<f64> {
    FadingParams::new(m)?;
    if !(n >= 0.0) || !n.is_finite() {
        return Err(invalid(format!("moment order must be a non-negative real, got {n}")));
    }
    if m.is_infinite() || n == 0.0 {
        return Ok(1.0);
    }
    Ok((libm::lgamma(m + n) - libm::lgamma(m) - n * m.ln()).exp())
}

/// How links shorter than the near-field radius are treated when building the interference field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NearFieldMode {
    /// Distance clamped to the near-field radius.
    Clamp,
    /// Transmitters inside the near-field radius contribute nothing: the
    /// field is the interference from the annulus beyond it.
    Exclude,
    /// Pure power law down to zero distance.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathLossModel {
    SingleSlope {
        gamma: f64,
        near_field_radius: f64,
    },
    /// Square region of side `inner_side` centered at the origin with exponent
    /// `gamma_inner`, surrounded by a region with exponent `gamma_outer`.
    TwoRegion {
        gamma_inner: f64,
        gamma_outer: f64,
        inner_side: f64,
        near_field_radius: f64,
    },
}

impl PathLossModel {
    pub fn single(gamma: f64) -> Self {
        PathLossModel::SingleSlope { gamma, near_field_radius: 1.0 }
    }

    pub fn near_field_radius(&self) -> f64 {
        match *self {
            PathLossModel::SingleSlope { near_field_radius, .. }
            | PathLossModel::TwoRegion { near_field_radius, .. } => near_field_radius,
        }
    }

    /// Exponent governing links near `at`.
    pub fn local_gamma(&self, at: Point) -> f64 {
        match *self {
            PathLossModel::SingleSlope { gamma, .. } => gamma,
            PathLossModel::TwoRegion { gamma_inner, gamma_outer, inner_side, .. } => {
                let h = inner_side / 2.0;
                if at.x.abs() <= h && at.y.abs() <= h {
                    gamma_inner
                } else {
                    gamma_outer
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            PathLossModel::SingleSlope { gamma, near_field_radius } => {
                pos("gamma", gamma)?;
                pos("near_field_radius", near_field_radius)
            }
            PathLossModel::TwoRegion { gamma_inner, gamma_outer, inner_side, near_field_radius } => {
                pos("gamma_inner", gamma_inner)?;
                pos("gamma_outer", gamma_outer)?;
                pos("inner_side", inner_side)?;
                pos("near_field_radius", near_field_radius)
            }
        }
    }
}

/// Length of the part of segment `a -> b` inside the axis-aligned square
/// `[-h, h]^2` (Liang-Barsky clipping; a square is convex, so the inside part
/// is a single interval).
pub fn inside_length(a: Point, b: Point, h: f64) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-dx, a.x + h), (dx, h - a.x), (-dy, a.y + h), (dy, h - a.y)] {
        if p == 0.0 {
            if q < 0.0 {
                return 0.0;
            }
            continue;
        }
        let t = q / p;
        if p < 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 > t1 {
            return 0.0;
        }
    }
    (t1 - t0) * (dx * dx + dy * dy).sqrt()
}

/// Attenuation between `tx` and `rx` under a near-field policy; `None` when the
/// link is excluded.
#[inline]
pub fn attenuation(model: &PathLossModel, mode: NearFieldMode, tx: Point, rx: Point) -> Option<f64> {
    match *model {
        PathLossModel::SingleSlope { gamma, near_field_radius } => {
            let d2 = tx.distance_sq(&rx);
            single_slope_sq(d2, gamma, near_field_radius, mode)
        }
        PathLossModel::TwoRegion { gamma_inner, gamma_outer, inner_side, near_field_radius: r0 } => {
            let d = tx.distance(&rx);
            let d = match mode {
                NearFieldMode::Clamp => d.max(r0),
                NearFieldMode::Exclude if d < r0 => return None,
                _ => d.max(MIN_DISTANCE),
            };
            let total = tx.distance(&rx);
            let r1 = inside_length(tx, rx, inner_side / 2.0).min(total);
            let r2 = total - r1;
            let value = if r1 <= 0.0 {
                (d / r0).powf(-gamma_outer)
            } else if r2 <= 0.0 {
                (d / r0).powf(-gamma_inner)
            } else {
                // breakpoint of the two-slope law, never inside the near field
                let knee = r1.max(r0);
                if d <= knee {
                    (d / r0).powf(-gamma_inner)
                } else {
                    (knee / r0).powf(-gamma_inner) * (d / knee).powf(-gamma_outer)
                }
            };
            Some(value)
        }
    }
}

const MIN_DISTANCE: f64 = 1e-12;

#[inline]
pub(crate) fn single_slope_sq(d2: f64, gamma: f64, a0: f64, mode: NearFieldMode) -> Option<f64> {
    let a2 = a0 * a0;
    match mode {
        NearFieldMode::Clamp => Some(d2.max(a2).powf(-0.5 * gamma)),
        NearFieldMode::Exclude => (d2 >= a2).then(|| d2.powf(-0.5 * gamma)),
        NearFieldMode::Off => Some(d2.max(MIN_DISTANCE * MIN_DISTANCE).powf(-0.5 * gamma)),
    }
}

/// Deterministic attenuation with the distance clamped at the near-field radius.
/// Coincident points get the clamped value.
pub fn path_loss(model: &PathLossModel, tx: Point, rx: Point) -> f64 {
    attenuation(model, NearFieldMode::Clamp, tx, rx).expect("clamped links are never excluded")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    /// Trapezoid rule on a log-spaced grid; independent of the log-gamma route.
    fn moment_by_quadrature(m: f64, n: f64) -> f64 {
        let pdf = |x: f64| (m * m.ln() - libm::lgamma(m) + (m - 1.0) * x.ln() - m * x).exp();
        let (lo, hi) = (1e-12f64, 60.0f64);
        let steps = 400_000;
        let h = (hi / lo).ln() / steps as f64;
        let mut acc = 0.0;
        for i in 0..=steps {
            let x = lo * (i as f64 * h).exp();
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            // dx = x du
            acc += w * x.powf(n) * pdf(x) * x;
        }
        acc * h
    }

    #[test]
    fn moment_examples() {
        for m in [0.5, 1.0, 2.5, 7.0] {
            assert!((nakagami_moment(m, 1.0).unwrap() - 1.0).abs() < 1e-12);
        }
        // Γ(1.5) = sqrt(pi)/2
        let g15 = std::f64::consts::PI.sqrt() / 2.0;
        assert!((nakagami_moment(1.0, 0.5).unwrap() - g15).abs() < 1e-12);
        assert!((moment_by_quadrature(1.0, 0.5) - g15).abs() < 1e-6);
        assert!((nakagami_moment(2.0, 2.0).unwrap() - 1.5).abs() < 1e-12);
        assert!((moment_by_quadrature(2.0, 2.0) - 1.5).abs() < 1e-6);
        assert!((moment_by_quadrature(1.0, 2.0) - 2.0).abs() < 1e-6);
        assert!(nakagami_moment(0.4, 1.0).is_err());
        assert_eq!(nakagami_moment(f64::INFINITY, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn sampler_rejects_small_m() {
        let mut rng = seeded(0);
        assert!(nakagami_power_sample(FadingParams { m: 0.3 }, &mut rng).is_err());
        assert_eq!(nakagami_power_sample(FadingParams::none(), &mut rng).unwrap(), 1.0);
    }

    fn draws(m: f64, n: usize, seed: u64) -> Vec<f64> {
        let s = FadingSampler::new(FadingParams { m }).unwrap();
        let mut rng = seeded(seed);
        (0..n).map(|_| s.sample(&mut rng)).collect()
    }

    #[test]
    fn rayleigh_moments() {
        let xs = draws(1.0, 1_000_000, 1);
        let m1 = xs.iter().sum::<f64>() / xs.len() as f64;
        let m2 = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
        assert!((m1 - 1.0).abs() < 0.01);
        assert!((m2 / 2.0 - 1.0).abs() < 0.02);
    }

    #[test]
    fn variance_is_inverse_m() {
        let xs = draws(4.0, 1_000_000, 2);
        let var = crate::stats::sample_variance(&xs);
        assert!((var / 0.25 - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn empirical_moments_within_three_standard_errors() {
        for (k, &m) in [0.5, 1.0, 2.0, 4.0].iter().enumerate() {
            let xs = draws(m, 1_000_000, 10 + k as u64);
            for n in [1, 2, 3] {
                let vals: Vec<f64> = xs.iter().map(|x| x.powi(n)).collect();
                let mean = crate::stats::mean(&vals);
                let se = (crate::stats::sample_variance(&vals) / vals.len() as f64).sqrt();
                let exact = nakagami_moment(m, n as f64).unwrap();
                assert!((mean - exact).abs() < 3.0 * se, "m={m} n={n}: {mean} vs {exact} (se {se})");
            }
        }
    }

    #[test]
    fn path_loss_examples() {
        let model = PathLossModel::SingleSlope { gamma: 4.0, near_field_radius: 1.0 };
        let o = Point::ORIGIN;
        assert!((path_loss(&model, o, Point::new(2.0, 0.0)) - 0.0625).abs() < 1e-15);
        assert_eq!(path_loss(&model, o, Point::new(0.5, 0.0)), 1.0);
        assert_eq!(path_loss(&model, o, o), 1.0);
        assert_eq!(attenuation(&model, NearFieldMode::Exclude, o, Point::new(0.5, 0.0)), None);
        let off = attenuation(&model, NearFieldMode::Off, o, Point::new(0.5, 0.0)).unwrap();
        assert!((off - 16.0).abs() < 1e-12);
    }

    #[test]
    fn two_region_example() {
        // receiver at the square's center, transmitter 5 m away along the x axis:
        // 2 m inside a side-4 square, 3 m outside
        let model = PathLossModel::TwoRegion { gamma_inner: 4.0, gamma_outer: 3.0, inner_side: 4.0, near_field_radius: 1.0 };
        let v = path_loss(&model, Point::new(5.0, 0.0), Point::ORIGIN);
        assert!((v - 0.004).abs() < 1e-15, "{v}");
        // both ends outside, segment misses the square: single slope with the outer exponent
        let w = path_loss(&model, Point::new(5.0, 5.0), Point::new(5.0, 9.0));
        assert!((w - 4f64.powf(-3.0)).abs() < 1e-15);
        // both inside
        let u = path_loss(&model, Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        assert!((u - 2f64.powf(-4.0)).abs() < 1e-15);
    }

    #[test]
    fn clipping_lengths() {
        let h = 1.0;
        assert!((inside_length(Point::new(-3.0, 0.0), Point::new(3.0, 0.0), h) - 2.0).abs() < 1e-12);
        assert!((inside_length(Point::new(0.0, 0.0), Point::new(3.0, 0.0), h) - 1.0).abs() < 1e-12);
        assert_eq!(inside_length(Point::new(2.0, 2.0), Point::new(3.0, 5.0), h), 0.0);
        // corner clip
        let l = inside_length(Point::new(0.0, 1.5), Point::new(1.5, 0.0), h);
        assert!((l - 0.5f64.hypot(0.5)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn two_region_reduces_to_single_slope(
            ax in -30.0f64..30.0, ay in -30.0f64..30.0,
            bx in -30.0f64..30.0, by in -30.0f64..30.0,
            gamma in 2.1f64..6.0, side in 1.0f64..20.0,
        ) {
            let a = Point::new(ax, ay);
            let b = Point::new(bx, by);
            let single = PathLossModel::SingleSlope { gamma, near_field_radius: 1.0 };
            let two = PathLossModel::TwoRegion { gamma_inner: gamma, gamma_outer: gamma, inner_side: side, near_field_radius: 1.0 };
            for mode in [NearFieldMode::Clamp, NearFieldMode::Exclude, NearFieldMode::Off] {
                let (s, t) = (attenuation(&single, mode, a, b), attenuation(&two, mode, a, b));
                match (s, t) {
                    (Some(s), Some(t)) => prop_assert!((s - t).abs() <= 1e-12 * s.max(1e-300), "{s} vs {t}"),
                    (None, None) => {}
                    other => prop_assert!(false, "{other:?}"),
                }
            }
        }

        #[test]
        fn path_loss_non_increasing_along_rays(
            ax in -15.0f64..15.0, ay in -15.0f64..15.0,
            angle in 0.0f64..std::f64::consts::TAU,
            g_in in 2.1f64..6.0, g_out in 2.1f64..6.0,
        ) {
            // the two-slope law is monotone when the inner exponent is the larger one
            let (g_in, g_out) = (g_in.max(g_out), g_in.min(g_out));
            let a = Point::new(ax, ay);
            let models = [
                PathLossModel::SingleSlope { gamma: g_out, near_field_radius: 1.0 },
                PathLossModel::TwoRegion { gamma_inner: g_in, gamma_outer: g_out, inner_side: 10.0, near_field_radius: 1.0 },
            ];
            for model in models {
                let mut prev = f64::INFINITY;
                for k in 0..400 {
                    let r = 0.1 * k as f64;
                    let b = Point::new(ax + r * angle.cos(), ay + r * angle.sin());
                    let v = path_loss(&model, a, b);
                    prop_assert!(v <= prev * (1.0 + 1e-12), "{model:?} r={r}: {v} > {prev}");
                    prev = v;
                }
            }
        }
    }
}
