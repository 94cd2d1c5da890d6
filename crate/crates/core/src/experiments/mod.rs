//! Monte Carlo harness: relative MSE of the estimators over many network
//! realizations, under the protocols of the individual studies (exponent and
//! fading sweeps, mobility, coordinated observers, a two-region exponent and
//! non-Poisson node layouts).
//!
//! Every realization is an independent work unit seeded from
//! `(base_seed, realization index)`, so reports are bit-reproducible and do not
//! depend on the thread count. Within a realization all arms of an experiment
//! share the pattern and the slot randomness (common random numbers), which
//! makes the reported orderings far less noisy than independent runs would.

mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{NearFieldMode, PathLossModel};
use crate::error::{invalid, Error, Result};
use crate::estimators::{
    estimate_ple_ks_fit, estimate_ple_mean_interference, estimate_ple_transmitting_set, estimate_ple_virtual_outage,
    transmitting_set_means, virtual_sir_samples, Algorithm, KsFitOptions, MeanInterferenceInputs, SearchBounds,
    ThresholdPair,
};
use crate::pointproc::{k_nearest_to, sample_pattern, Point, ProcessModel, Window};
use crate::rng::{Purpose, SeedStream};
use crate::simcore::{run_multi_trace, ChannelParams, MacParams, PowerControl, SlotMeasurement};
use crate::stats::quantile_sorted;

pub use report::{ExperimentReport, Quantiles, ReportRow, CSV_HEADER};

pub const DEFAULT_CHECKPOINTS: [usize; 6] = [250, 500, 1000, 2000, 4000, 10_000];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ProcessModel,
    pub window: Window,
    /// Single-slope exponent; sweeps override it per point.
    pub gamma: f64,
    pub m: f64,
    /// Near-field radius A0, also the reference distance of the two-region model.
    pub near_field_radius: f64,
    pub mac: MacParams,
    /// Slots per realization, N.
    pub n_slots: usize,
    /// Slot counts at which estimates are formed (those above `n_slots` are
    /// dropped, `n_slots` itself is always included).
    pub checkpoints: Vec<usize>,
    pub n_realizations: usize,
    pub thresholds: ThresholdPair,
    pub bounds: SearchBounds,
    pub ks: KsFitOptions,
    /// Near-field treatment of the traces fed to the mean-interference estimator.
    pub near_field_mean: NearFieldMode,
    /// Near-field treatment of the traces fed to the SIR-based estimators.
    pub near_field_sir: NearFieldMode,
    /// Observers are the nodes nearest to this point (window center when absent).
    pub observer_target: Option<Point>,
    pub base_seed: u64,
}

impl Default for ExperimentConfig {
    /// 50 m × 50 m window, λ = 1, p = 0.05, N0 = -25 dBm, γ = 4, Rayleigh fading.
    fn default() -> Self {
        Self {
            model: ProcessModel::ppp(1.0),
            window: Window::centered_square(50.0).expect("valid window"),
            gamma: 4.0,
            m: 1.0,
            near_field_radius: 1.0,
            mac: MacParams::default(),
            n_slots: 10_000,
            checkpoints: DEFAULT_CHECKPOINTS.to_vec(),
            n_realizations: 500,
            thresholds: ThresholdPair::default(),
            bounds: SearchBounds::default(),
            ks: KsFitOptions::default(),
            near_field_mean: NearFieldMode::Exclude,
            near_field_sir: NearFieldMode::Off,
            observer_target: None,
            base_seed: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.window.validate()?;
        self.mac.validate()?;
        self.thresholds.validate()?;
        self.bounds.validate()?;
        if self.n_slots == 0 || self.n_realizations == 0 {
            return Err(invalid("need at least one slot and one realization"));
        }
        if self.checkpoints.contains(&0) {
            return Err(invalid("checkpoints must be positive"));
        }
        if !(self.near_field_radius > 0.0) {
            return Err(invalid("near-field radius must be positive"));
        }
        Ok(())
    }

    /// Sorted, de-duplicated checkpoints not exceeding `n_slots`, ending at `n_slots`.
    pub fn effective_checkpoints(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.checkpoints.iter().copied().filter(|&n| n <= self.n_slots).collect();
        c.push(self.n_slots);
        c.sort_unstable();
        c.dedup();
        c
    }

    fn target(&self) -> Point {
        self.observer_target.unwrap_or_else(|| self.window.center())
    }

    fn near_field_for(&self, algorithm: Algorithm) -> NearFieldMode {
        match algorithm {
            Algorithm::MeanInterference => self.near_field_mean,
            _ => self.near_field_sir,
        }
    }
}

/// `mean((γ̂ - γ)²) / γ`: note the normalization by γ, not γ².
pub fn relative_mse(estimates: &[f64], gamma_true: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(gamma_true > 0.0) {
        return Err(invalid(format!("true exponent must be positive, got {gamma_true}")));
    }
    let sq = estimates.iter().map(|g| (g - gamma_true) * (g - gamma_true)).sum::<f64>();
    Ok(sq / estimates.len() as f64 / gamma_true)
}

/// One simulated configuration within an experiment.
#[derive(Debug, Clone, Copy)]
struct Arm {
    model: ProcessModel,
    path_loss: PathLossModel,
    m: f64,
    mac: MacParams,
    mobility_v: f64,
    k_observers: usize,
    target: Point,
}

impl Arm {
    fn base(cfg: &ExperimentConfig) -> Self {
        Self {
            model: cfg.model,
            path_loss: PathLossModel::SingleSlope { gamma: cfg.gamma, near_field_radius: cfg.near_field_radius },
            m: cfg.m,
            mac: cfg.mac,
            mobility_v: 0.0,
            k_observers: 1,
            target: cfg.target(),
        }
    }

    fn with_gamma(mut self, gamma: f64, a0: f64) -> Self {
        self.path_loss = PathLossModel::SingleSlope { gamma, near_field_radius: a0 };
        self
    }
}

/// Estimates of one realization, indexed `[algorithm][checkpoint]`; `None` marks an estimator failure.
type Outcome = Vec<Vec<Option<f64>>>;

fn run_realization(cfg: &ExperimentConfig, arm: &Arm, algorithms: &[Algorithm], checkpoints: &[usize], r: u64) -> Result<Outcome> {
    let streams = SeedStream::new(cfg.base_seed);
    let pattern = sample_pattern(&arm.model, &cfg.window, &mut streams.rng(r, Purpose::Pattern))?;
    let observers = k_nearest_to(&pattern, arm.target, arm.k_observers)?;
    let mut out: Outcome = vec![Vec::new(); algorithms.len()];

    for mode in [cfg.near_field_mean, cfg.near_field_sir] {
        let group: Vec<usize> = (0..algorithms.len())
            .filter(|&i| cfg.near_field_for(algorithms[i]) == mode && out[i].is_empty())
            .collect();
        if group.is_empty() {
            continue;
        }
        let channel = ChannelParams::new(arm.m, arm.path_loss, mode);
        let traces = run_multi_trace(
            &pattern,
            &observers,
            &channel,
            &arm.mac,
            cfg.n_slots,
            arm.mobility_v,
            false,
            &mut streams.rng(r, Purpose::Slots),
        )?;
        let needs_sir = group
            .iter()
            .any(|&i| matches!(algorithms[i], Algorithm::VirtualOutage | Algorithm::KsFit));
        let sirs: Vec<Vec<f64>> = if needs_sir {
            let mut rng = streams.rng(r, Purpose::VirtualSignal);
            traces.iter().map(|t| virtual_sir_samples(&t.measurements, None, &mut rng)).collect()
        } else {
            Vec::new()
        };
        for &cp in checkpoints {
            let meas: Vec<SlotMeasurement> = traces.iter().flat_map(|t| t.measurements[..cp].iter().cloned()).collect();
            let sir: Vec<f64> = sirs.iter().flat_map(|s| s[..cp].iter().copied()).collect();
            for &i in &group {
                let est = match algorithms[i] {
                    Algorithm::MeanInterference => {
                        let inputs = MeanInterferenceInputs {
                            density: arm.model.intensity(),
                            p: arm.mac.p,
                            noise_power: arm.mac.noise_power,
                            near_field_radius: arm.path_loss.near_field_radius(),
                        };
                        estimate_ple_mean_interference(&meas, &inputs, cfg.bounds)
                    }
                    Algorithm::VirtualOutage => estimate_ple_virtual_outage(&sir, cfg.thresholds),
                    Algorithm::KsFit => estimate_ple_ks_fit(&sir, cfg.ks),
                    Algorithm::TransmittingSet => transmitting_set_means(&meas, cfg.thresholds)
                        .and_then(|means| estimate_ple_transmitting_set(means, cfg.thresholds, meas.len())),
                };
                out[i].push(est.ok().map(|e| e.gamma_hat));
            }
        }
    }
    Ok(out)
}

fn run_arm(cfg: &ExperimentConfig, arm: &Arm, algorithms: &[Algorithm]) -> Result<(Vec<usize>, Vec<Outcome>)> {
    let checkpoints = cfg.effective_checkpoints();
    let outcomes = (0..cfg.n_realizations as u64)
        .into_par_iter()
        .map(|r| run_realization(cfg, arm, algorithms, &checkpoints, r))
        .collect::<Result<Vec<_>>>()?;
    Ok((checkpoints, outcomes))
}

/// Static description of the rows produced by one arm.
struct RowLabel<'a> {
    experiment: &'a str,
    model: String,
    gamma_true: f64,
    m: f64,
    param: Option<f64>,
}

fn summarize(label: &RowLabel<'_>, algorithm: Algorithm, n_slots: usize, estimates: &[Option<f64>]) -> ReportRow {
    let mut ok: Vec<f64> = estimates.iter().flatten().copied().collect();
    ok.sort_by(f64::total_cmp);
    let n = estimates.len();
    let failure_rate = (n - ok.len()) as f64 / n as f64;
    let (rel_mse, bias, quantiles) = if ok.is_empty() {
        (f64::NAN, f64::NAN, None)
    } else {
        let q = |p| quantile_sorted(&ok, p);
        (
            relative_mse(&ok, label.gamma_true).expect("non-empty"),
            ok.iter().map(|g| g - label.gamma_true).sum::<f64>() / ok.len() as f64,
            Some(Quantiles { q05: q(0.05), q25: q(0.25), q50: q(0.5), q75: q(0.75), q95: q(0.95) }),
        )
    };
    ReportRow {
        experiment: label.experiment.to_string(),
        algorithm,
        model: label.model.clone(),
        gamma_true: label.gamma_true,
        m: label.m,
        param: label.param,
        n_slots,
        n_realizations: n,
        rel_mse,
        bias,
        failure_rate,
        quantiles,
    }
}

fn rows_for_arm(cfg: &ExperimentConfig, arm: &Arm, algorithms: &[Algorithm], label: RowLabel<'_>) -> Result<Vec<ReportRow>> {
    let (checkpoints, outcomes) = run_arm(cfg, arm, algorithms)?;
    let mut rows = Vec::new();
    for (a, &algorithm) in algorithms.iter().enumerate() {
        for (c, &n_slots) in checkpoints.iter().enumerate() {
            let estimates: Vec<Option<f64>> = outcomes.iter().map(|o| o[a][c]).collect();
            rows.push(summarize(&label, algorithm, n_slots, &estimates));
        }
    }
    Ok(rows)
}

fn check_algorithms(algorithms: &[Algorithm]) -> Result<()> {
    if algorithms.is_empty() {
        return Err(invalid("select at least one algorithm"));
    }
    Ok(())
}

fn report(experiment: &str, cfg: &ExperimentConfig, rows: Vec<ReportRow>) -> ExperimentReport {
    ExperimentReport { experiment: experiment.to_string(), config: cfg.clone(), rows }
}

/// Relative MSE against N for each exponent in `gammas` (one observer, static nodes).
pub fn run_mse_sweep(cfg: &ExperimentConfig, algorithms: &[Algorithm], gammas: &[f64]) -> Result<ExperimentReport> {
    cfg.validate()?;
    check_algorithms(algorithms)?;
    let mut rows = Vec::new();
    for &gamma in gammas {
        let arm = Arm::base(cfg).with_gamma(gamma, cfg.near_field_radius);
        let label = RowLabel { experiment: "mse_sweep", model: cfg.model.tag().as_str().into(), gamma_true: gamma, m: cfg.m, param: None };
        rows.extend(rows_for_arm(cfg, &arm, algorithms, label)?);
    }
    Ok(report("mse_sweep", cfg, rows))
}

/// Relative MSE against the Nakagami parameter at `cfg.gamma`.
pub fn run_mse_vs_m(cfg: &ExperimentConfig, algorithms: &[Algorithm], ms: &[f64]) -> Result<ExperimentReport> {
    cfg.validate()?;
    check_algorithms(algorithms)?;
    let mut rows = Vec::new();
    for &m in ms {
        let arm = Arm { m, ..Arm::base(cfg) };
        let label = RowLabel { experiment: "mse_vs_m", model: cfg.model.tag().as_str().into(), gamma_true: cfg.gamma, m, param: Some(m) };
        rows.extend(rows_for_arm(cfg, &arm, algorithms, label)?);
    }
    Ok(report("mse_vs_m", cfg, rows))
}

/// Static (`v = 0`) against random-walk nodes moving `v` meters per slot.
pub fn run_mobility_experiment(cfg: &ExperimentConfig, algorithms: &[Algorithm], speeds: &[f64]) -> Result<ExperimentReport> {
    cfg.validate()?;
    check_algorithms(algorithms)?;
    let mut rows = Vec::new();
    for &v in speeds {
        let arm = Arm { mobility_v: v, ..Arm::base(cfg) };
        let label = RowLabel { experiment: "mobility", model: cfg.model.tag().as_str().into(), gamma_true: cfg.gamma, m: cfg.m, param: Some(v) };
        rows.extend(rows_for_arm(cfg, &arm, algorithms, label)?);
    }
    Ok(report("mobility", cfg, rows))
}

/// Measurements pooled over the `K` nodes nearest to the center, for each `K`.
pub fn run_coordination_experiment(cfg: &ExperimentConfig, algorithms: &[Algorithm], ks: &[usize]) -> Result<ExperimentReport> {
    cfg.validate()?;
    check_algorithms(algorithms)?;
    if ks.contains(&0) {
        return Err(invalid("K must be at least 1"));
    }
    let mut rows = Vec::new();
    for &k in ks {
        let arm = Arm { k_observers: k, ..Arm::base(cfg) };
        let label = RowLabel { experiment: "coordination", model: cfg.model.tag().as_str().into(), gamma_true: cfg.gamma, m: cfg.m, param: Some(k as f64) };
        rows.extend(rows_for_arm(cfg, &arm, algorithms, label)?);
    }
    Ok(report("coordination", cfg, rows))
}

/// Two-region exponent setup of the varying-PLE study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoRegionSetup {
    pub gamma_inner: f64,
    pub gamma_outer: f64,
    /// Side length l of the central square with exponent `gamma_inner`.
    pub inner_side: f64,
}

impl Default for TwoRegionSetup {
    fn default() -> Self {
        Self { gamma_inner: 4.0, gamma_outer: 3.0, inner_side: 10.0 }
    }
}

/// Observer pinned at the node nearest to `(x, 0)` for each `x`; estimates are
/// scored against the exponent of the region containing that point.
pub fn run_varying_ple_experiment(
    cfg: &ExperimentConfig,
    algorithms: &[Algorithm],
    setup: TwoRegionSetup,
    xs: &[f64],
) -> Result<ExperimentReport> {
    cfg.validate()?;
    check_algorithms(algorithms)?;
    let path_loss = PathLossModel::TwoRegion {
        gamma_inner: setup.gamma_inner,
        gamma_outer: setup.gamma_outer,
        inner_side: setup.inner_side,
        near_field_radius: cfg.near_field_radius,
    };
    path_loss.validate()?;
    let mut rows = Vec::new();
    for &x in xs {
        let target = Point::new(x, 0.0);
        let arm = Arm { path_loss, target, ..Arm::base(cfg) };
        let label = RowLabel {
            experiment: "varying_ple",
            model: format!("{}/two_region", cfg.model.tag().as_str()),
            gamma_true: path_loss.local_gamma(target),
            m: cfg.m,
            param: Some(x),
        };
        rows.extend(rows_for_arm(cfg, &arm, algorithms, label)?);
    }
    Ok(report("varying_ple", cfg, rows))
}

/// Each node model with and without exponential power control.
pub fn run_nonppp_experiment(
    cfg: &ExperimentConfig,
    algorithms: &[Algorithm],
    models: &[ProcessModel],
    power_controls: &[PowerControl],
) -> Result<ExperimentReport> {
    cfg.validate()?;
    check_algorithms(algorithms)?;
    let mut rows = Vec::new();
    for model in models {
        model.validate()?;
        for &pc in power_controls {
            let arm = Arm { model: *model, mac: MacParams { power_control: pc, ..cfg.mac }, ..Arm::base(cfg) };
            let suffix = match pc {
                PowerControl::Unit => "unit_power",
                PowerControl::ExponentialUnitMean => "exp_power",
            };
            let label = RowLabel {
                experiment: "nonppp",
                model: format!("{}/{suffix}", model.tag().as_str()),
                gamma_true: cfg.gamma,
                m: cfg.m,
                param: None,
            };
            rows.extend(rows_for_arm(cfg, &arm, algorithms, label)?);
        }
    }
    Ok(report("nonppp", cfg, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::{run_trace, NodeSource, TraceOptions};
    use crate::stats::mean;

    fn small(n_slots: usize, n_realizations: usize) -> ExperimentConfig {
        ExperimentConfig { n_slots, n_realizations, ..ExperimentConfig::default() }
    }

    #[test]
    fn relative_mse_examples() {
        assert_eq!(relative_mse(&[3.0, 3.0, 3.0], 3.0).unwrap(), 0.0);
        assert!((relative_mse(&[2.5, 3.5], 3.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((relative_mse(&[4.0], 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(relative_mse(&[], 3.0), Err(Error::EmptyInput));
    }

    #[test]
    fn checkpoints_are_capped_and_closed() {
        let cfg = small(1000, 1);
        assert_eq!(cfg.effective_checkpoints(), vec![250, 500, 1000]);
        assert_eq!(small(1, 1).effective_checkpoints(), vec![1]);
        assert_eq!(small(3000, 1).effective_checkpoints(), vec![250, 500, 1000, 2000, 3000]);
    }

    #[test]
    fn sweep_is_reproducible() {
        let cfg = ExperimentConfig { gamma: 3.0, ..small(1, 1) };
        let a = run_mse_sweep(&cfg, &Algorithm::ALL, &[3.0]).unwrap();
        let b = run_mse_sweep(&cfg, &Algorithm::ALL, &[3.0]).unwrap();
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        a.write_csv(&mut ca).unwrap();
        b.write_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
        assert_eq!(a.rows.len(), 4);
        assert_eq!(String::from_utf8(ca).unwrap().lines().next().unwrap(), CSV_HEADER.join(","));
    }

    #[test]
    fn rows_are_consistent() {
        let cfg = ExperimentConfig { checkpoints: vec![250, 1000], ..small(1000, 12) };
        let rep = run_mse_sweep(&cfg, &Algorithm::ALL, &[3.0, 4.0]).unwrap();
        assert_eq!(rep.rows.len(), 2 * 4 * 2);
        for r in &rep.rows {
            assert!((0.0..=1.0).contains(&r.failure_rate));
            if r.failure_rate < 1.0 {
                // Jensen: the mean squared error dominates the squared mean error
                assert!(r.rel_mse + 1e-12 >= r.bias * r.bias / r.gamma_true, "{r:?}");
            }
        }
    }

    #[test]
    fn arms_reduce_to_baseline() {
        let cfg = ExperimentConfig { gamma: 3.0, checkpoints: vec![], ..small(300, 4) };
        let algs = [Algorithm::MeanInterference, Algorithm::TransmittingSet, Algorithm::VirtualOutage];
        let base = run_mse_sweep(&cfg, &algs, &[3.0]).unwrap();
        let mob = run_mobility_experiment(&cfg, &algs, &[0.0]).unwrap();
        let coord = run_coordination_experiment(&cfg, &algs, &[1]).unwrap();
        let m1 = run_mse_vs_m(&cfg, &algs, &[1.0, 1.0]).unwrap();
        for alg in algs {
            let b = base.find(alg, None, 300).unwrap();
            for other in [mob.find(alg, Some(0.0), 300), coord.find(alg, Some(1.0), 300)] {
                let o = other.unwrap();
                assert_eq!((o.rel_mse.to_bits(), o.bias.to_bits()), (b.rel_mse.to_bits(), b.bias.to_bits()));
            }
            let twins: Vec<&ReportRow> = m1.rows_for(alg).collect();
            assert_eq!(twins[0].rel_mse.to_bits(), twins[1].rel_mse.to_bits());
        }
    }

    #[test]
    fn equal_exponents_reduce_two_region_to_single_slope() {
        let cfg = ExperimentConfig { gamma: 4.0, checkpoints: vec![], ..small(400, 3) };
        let setup = TwoRegionSetup { gamma_inner: 4.0, gamma_outer: 4.0, inner_side: 10.0 };
        let algs = [Algorithm::TransmittingSet, Algorithm::MeanInterference];
        let two = run_varying_ple_experiment(&cfg, &algs, setup, &[0.0]).unwrap();
        let one = run_mse_sweep(&cfg, &algs, &[4.0]).unwrap();
        for alg in algs {
            let (a, b) = (two.find(alg, Some(0.0), 400).unwrap(), one.find(alg, None, 400).unwrap());
            assert!((a.rel_mse - b.rel_mse).abs() <= 1e-12 * b.rel_mse.abs().max(1e-300), "{alg}: {} vs {}", a.rel_mse, b.rel_mse);
            assert!((a.bias - b.bias).abs() < 1e-12);
        }
    }

    #[test]
    fn failures_are_counted_not_scored() {
        // ten slots leave the KS fit without enough samples
        let cfg = small(10, 3);
        let rep = run_mse_sweep(&cfg, &[Algorithm::KsFit], &[4.0]).unwrap();
        let row = &rep.rows[0];
        assert_eq!(row.failure_rate, 1.0);
        assert!(row.rel_mse.is_nan() && row.quantiles.is_none());
    }

    #[test]
    fn spatial_and_ensemble_averages_agree() {
        // pooled over 32 observers of one realization vs one observer in each of 32 realizations
        let n = 2000;
        let channel = ChannelParams::new(1.0, PathLossModel::single(3.0), NearFieldMode::Exclude);
        let mac = MacParams::default();
        let w = Window::centered_square(50.0).unwrap();
        let model = ProcessModel::ppp(1.0);
        let mut diffs = Vec::new();
        for block in 0..9u64 {
            let streams = SeedStream::new(100 + block);
            let pattern = sample_pattern(&model, &w, &mut streams.rng(0, Purpose::Pattern)).unwrap();
            let obs = k_nearest_to(&pattern, Point::ORIGIN, 32).unwrap();
            let traces = run_multi_trace(&pattern, &obs, &channel, &mac, n, 0.0, false, &mut streams.rng(0, Purpose::Slots)).unwrap();
            let spatial = mean(&crate::estimators::pool_measurements(&traces).unwrap().iter().map(|m| m.total_received_power).collect::<Vec<_>>());
            let ensemble = mean(
                &(1..=32)
                    .map(|r| {
                        let src = NodeSource::Model { model, window: w };
                        let t = run_trace(src, &channel, &mac, n, TraceOptions::default(), &mut streams.rng(r, Purpose::Slots)).unwrap();
                        mean(&t.total_powers())
                    })
                    .collect::<Vec<_>>(),
            );
            diffs.push((spatial / ensemble - 1.0).abs());
        }
        diffs.sort_by(f64::total_cmp);
        assert!(diffs[4] < 0.05, "{diffs:?}");
    }

    #[test]
    fn mse_shrinks_with_more_slots() {
        let checkpoints = [250, 1000, 4000];
        let mut per_block: Vec<Vec<f64>> = vec![Vec::new(); checkpoints.len()];
        for block in 0..20 {
            let cfg = ExperimentConfig { gamma: 3.0, checkpoints: checkpoints.to_vec(), base_seed: 1000 + block, ..small(4000, 8) };
            let rep = run_mse_sweep(&cfg, &[Algorithm::MeanInterference], &[3.0]).unwrap();
            for (i, &cp) in checkpoints.iter().enumerate() {
                per_block[i].push(rep.find(Algorithm::MeanInterference, None, cp).unwrap().rel_mse);
            }
        }
        let medians: Vec<f64> = per_block
            .into_iter()
            .map(|mut v| {
                v.sort_by(f64::total_cmp);
                quantile_sorted(&v, 0.5)
            })
            .collect();
        assert!(medians.windows(2).all(|w| w[1] <= w[0]), "{medians:?}");
    }
}
