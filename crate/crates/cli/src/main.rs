//! `plesim` command-line front end.

mod config;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use plesim::channel::{nakagami_moment, NearFieldMode, PathLossModel};
use plesim::estimators::{
    estimate_nakagami_m, estimate_ple_ks_fit, estimate_ple_mean_interference, estimate_ple_transmitting_set,
    estimate_ple_virtual_outage, transmitting_set_means, virtual_sir_samples, Algorithm, KsFitOptions,
    MeanInterferenceInputs, PleEstimate, SearchBounds, ThresholdPair,
};
use plesim::experiments::{
    run_coordination_experiment, run_mobility_experiment, run_mse_sweep, run_mse_vs_m, run_nonppp_experiment,
    run_varying_ple_experiment, ExperimentConfig, ExperimentReport, TwoRegionSetup, DEFAULT_CHECKPOINTS,
};
use plesim::pointproc::{sample_pattern, Window};
use plesim::rng::{seeded, Purpose, SeedStream};
use plesim::simcore::{run_trace, ChannelParams, MacParams, NodeSource, SlotMeasurement, TraceOptions};
use plesim::theory::{
    energy_ratio, interference_cumulant, interference_laplace, mean_interference, mean_transmitting_set_cardinality,
    success_probability, success_probability_at_distance, NetworkParams,
};
use plesim::{db_to_linear, stats};

use config::{AlgoArg, ModelArg, Net, NetFlags, RunConfig};

/// Invalid invocation: bad flags, bad config keys, unreadable inputs.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(name = "plesim", version, about = "Interference-field simulator and path loss exponent estimators")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for experiments (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON run configuration; flags take precedence over its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a closed-form value.
    Theory(TheoryArgs),
    /// Simulate one observer and dump its trace.
    Simulate(SimulateArgs),
    /// Estimate the path loss exponent from a trace or SIR samples.
    Estimate(EstimateArgs),
    /// Run a named Monte Carlo experiment and write its report.
    Experiment(ExperimentArgs),
    /// Run the built-in oracle checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TheoryOp {
    MeanInterference,
    Cumulant,
    SuccessProb,
    SuccessProbAtDistance,
    Laplace,
    MeanTxSet,
    EnergyRatio,
    NakagamiMoment,
}

#[derive(Debug, Args)]
struct TheoryArgs {
    #[arg(long, value_enum)]
    op: TheoryOp,
    #[arg(long = "lambda", default_value_t = 1.0)]
    density: f64,
    #[arg(long, default_value_t = 0.05)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 4.0)]
    gamma: f64,
    /// Inner annulus radius A (m).
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Outer annulus radius B (m); `inf` for the whole plane.
    #[arg(long, default_value_t = f64::INFINITY)]
    b: f64,
    /// Cumulant or moment order.
    #[arg(long, default_value_t = 1.0)]
    order: f64,
    /// Linear SINR threshold.
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Link distance (m).
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Laplace transform variable.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 2)]
    hops: u32,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    net: NetFlags,
    /// Random-walk speed of every node (m per slot).
    #[arg(long = "v-m-per-slot")]
    v: Option<f64>,
    /// Draw a fresh pattern for every slot.
    #[arg(long)]
    fresh: bool,
    /// Trace CSV (`slot,total_power,n_tx,strongest_power`); `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
    /// Per-transmitter CSV (`slot,tx_index,power`).
    #[arg(long)]
    detail: Option<PathBuf>,
    /// Node positions (`x,y`) of the sampled pattern.
    #[arg(long)]
    pattern: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Trace CSV as written by `simulate`.
    #[arg(long, conflicts_with = "sirs")]
    trace: Option<PathBuf>,
    /// Per-transmitter CSV matching `--trace`.
    #[arg(long, requires = "trace")]
    detail: Option<PathBuf>,
    /// CSV with a `sir` column (linear), used instead of virtual SIRs.
    #[arg(long)]
    sirs: Option<PathBuf>,
    #[arg(long, default_value_t = 10.0)]
    theta1_db: f64,
    #[arg(long, default_value_t = 0.0)]
    theta2_db: f64,
    /// Known node density (mean and Nakagami estimators).
    #[arg(long = "lambda")]
    density: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    n0_dbm: Option<f64>,
    #[arg(long = "a0-m")]
    a0_m: Option<f64>,
    /// Known constant c of the KS fit (fit γ only).
    #[arg(long)]
    known_c: Option<f64>,
    /// Remove the noise power before forming virtual SIRs.
    #[arg(long)]
    subtract_noise: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentName {
    MseSweep,
    MseVsM,
    Mobility,
    Coordination,
    VaryingPle,
    Nonppp,
}

impl ExperimentName {
    fn file_stem(self) -> &'static str {
        match self {
            Self::MseSweep => "mse-sweep",
            Self::MseVsM => "mse-vs-m",
            Self::Mobility => "mobility",
            Self::Coordination => "coordination",
            Self::VaryingPle => "varying-ple",
            Self::Nonppp => "nonppp",
        }
    }
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    name: ExperimentName,
    #[command(flatten)]
    net: NetFlags,
    /// Output directory for `<name>.csv` and `<name>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<usize>>,
    #[arg(long, value_enum, value_delimiter = ',')]
    algos: Option<Vec<AlgoArg>>,
    #[arg(long)]
    theta1_db: Option<f64>,
    #[arg(long)]
    theta2_db: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    ms: Option<Vec<f64>>,
    #[arg(long = "speeds-m-per-slot", value_delimiter = ',')]
    speeds: Option<Vec<f64>>,
    /// Observer counts K for the coordination experiment.
    #[arg(long, value_delimiter = ',')]
    observers: Option<Vec<usize>>,
    /// Observer x positions (m) for the varying-exponent experiment.
    #[arg(long = "xs-m", value_delimiter = ',', allow_negative_numbers = true)]
    xs: Option<Vec<f64>>,
    #[arg(long, value_enum, value_delimiter = ',')]
    models: Option<Vec<ModelArg>>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(1);
    if let Some(n) = cli.threads.or(file.threads) {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring worker threads")?;
    }
    match cli.command {
        Command::Theory(args) => theory(&args),
        Command::Simulate(args) => simulate(&args, &file, seed),
        Command::Estimate(args) => estimate(&args, &file, seed),
        Command::Experiment(args) => experiment(&args, &file, seed),
        Command::Selftest => selftest(seed),
    }
}

/// `value` rounded to six significant digits, in fixed notation where that stays readable.
fn format_sig(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let magnitude = value.abs().log10().floor() as i32;
    if (-4..6).contains(&magnitude) {
        format!("{:.*}", (5 - magnitude).max(0) as usize, value)
    } else {
        format!("{value:.5e}")
    }
}

fn theory(a: &TheoryArgs) -> anyhow::Result<()> {
    let params = NetworkParams::new(a.density, a.p, a.m, a.gamma);
    let order_u32 = || -> anyhow::Result<u32> {
        if a.order >= 1.0 && a.order.fract() == 0.0 {
            Ok(a.order as u32)
        } else {
            Err(usage(format!("--order must be a positive integer for this operation, got {}", a.order)))
        }
    };
    let m_u32 = || -> anyhow::Result<u32> {
        if a.m >= 1.0 && a.m.fract() == 0.0 {
            Ok(a.m as u32)
        } else {
            Err(usage(format!("--m must be a positive integer for this operation, got {}", a.m)))
        }
    };
    let value = match a.op {
        TheoryOp::MeanInterference => {
            if a.b.is_finite() {
                interference_cumulant(1, &params, a.a, a.b)?
            } else {
                mean_interference(&params, a.a)?
            }
        }
        TheoryOp::Cumulant => interference_cumulant(order_u32()?, &params, a.a, a.b)?,
        TheoryOp::SuccessProb => success_probability(&params, a.theta)?,
        TheoryOp::SuccessProbAtDistance => success_probability_at_distance(&params, a.theta, a.r)?,
        TheoryOp::Laplace => interference_laplace(&params, a.s)?,
        TheoryOp::MeanTxSet => mean_transmitting_set_cardinality(m_u32()?, a.gamma, a.theta)?,
        TheoryOp::EnergyRatio => energy_ratio(a.hops, a.gamma)?,
        TheoryOp::NakagamiMoment => nakagami_moment(a.m, a.order)?,
    };
    println!("{}", format_sig(value));
    Ok(())
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn simulate(args: &SimulateArgs, file: &RunConfig, seed: u64) -> anyhow::Result<()> {
    let net = Net::resolve(&args.net, file, 1000);
    let window = Window::centered_square(net.window_side_m)?;
    let model = net.model.build(net.density);
    let channel = ChannelParams::new(
        net.m,
        PathLossModel::SingleSlope { gamma: net.gamma, near_field_radius: net.a0_m },
        net.near_field.map(Into::into).unwrap_or(NearFieldMode::Clamp),
    );
    let mac = MacParams { p: net.p, noise_power: db_to_linear(net.n0_dbm), power_control: net.power_control.into() };
    let v = args.v.or(file.v_m_per_slot).unwrap_or(0.0);
    let streams = SeedStream::new(seed);

    let pattern = if args.fresh { None } else { Some(sample_pattern(&model, &window, &mut streams.rng(0, Purpose::Pattern))?) };
    if let (Some(path), Some(p)) = (&args.pattern, &pattern) {
        p.write_csv(create(path)?)?;
    }
    let source = match &pattern {
        Some(p) => NodeSource::Fixed(p),
        None => NodeSource::Model { model, window },
    };
    let opts = TraceOptions {
        mobility_v: v,
        fresh_pattern_per_slot: args.fresh,
        record_detail: args.detail.is_some(),
        ..TraceOptions::default()
    };
    let trace = run_trace(source, &channel, &mac, net.n_slots, opts, &mut streams.rng(0, Purpose::Slots))?;
    if args.out == "-" {
        trace.write_csv(std::io::stdout().lock())?;
    } else {
        trace.write_csv(create(Path::new(&args.out))?)?;
    }
    if let Some(path) = &args.detail {
        trace.write_detail_csv(create(path)?)?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct TraceRow {
    slot: usize,
    total_power: f64,
    n_tx: usize,
    #[serde(default)]
    strongest_power: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct DetailRow {
    slot: usize,
    tx_index: usize,
    power: f64,
}

#[derive(Debug, Deserialize)]
struct SirRow {
    sir: f64,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| usage(format!("malformed {}: {e}", path.display())))
}

fn read_trace(path: &Path, detail: Option<&Path>) -> anyhow::Result<Vec<SlotMeasurement>> {
    let rows: Vec<TraceRow> = read_rows(path)?;
    let mut components: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    if let Some(d) = detail {
        for r in read_rows::<DetailRow>(d)? {
            components.entry(r.slot).or_default().push((r.tx_index, r.power));
        }
    }
    Ok(rows
        .into_iter()
        .map(|r| {
            let mut m = SlotMeasurement::total_only(r.total_power, r.n_tx);
            if let Some(s) = r.strongest_power {
                m.strongest_power = s;
            }
            if detail.is_some() {
                let comps = components.remove(&r.slot).unwrap_or_default();
                m.strongest_power = comps.iter().map(|c| c.1).fold(0.0, f64::max);
                m.per_transmitter_powers = Some(comps);
            }
            m
        })
        .collect())
}

fn estimate_json(est: &PleEstimate) -> serde_json::Value {
    let mut obj = serde_json::json!({
        "gamma_hat": est.gamma_hat,
        "algorithm": est.algorithm.as_str(),
        "n_slots": est.n_slots_used,
        "boundary": est.boundary,
        "diagnostics": est.diagnostics,
    });
    if let Some(m) = est.m_hat {
        obj["m_hat"] = serde_json::json!(m);
    }
    obj
}

fn estimate(args: &EstimateArgs, file: &RunConfig, seed: u64) -> anyhow::Result<()> {
    let thresholds = ThresholdPair::from_db(args.theta1_db, args.theta2_db);
    let noise = db_to_linear(args.n0_dbm.or(file.n0_dbm).unwrap_or(-25.0));
    let measurements = match &args.trace {
        Some(path) => Some(read_trace(path, args.detail.as_deref())?),
        None => None,
    };
    let need_trace = || measurements.as_deref().ok_or_else(|| usage(format!("--algo {:?} needs --trace", args.algo)));
    let sirs = || -> anyhow::Result<Vec<f64>> {
        if let Some(path) = &args.sirs {
            return Ok(read_rows::<SirRow>(path)?.into_iter().map(|r| r.sir).collect());
        }
        let ms = measurements.as_deref().ok_or_else(|| usage("need --trace or --sirs"))?;
        let subtract = args.subtract_noise.then_some(noise);
        Ok(virtual_sir_samples(ms, subtract, &mut SeedStream::new(seed).rng(0, Purpose::VirtualSignal)))
    };
    let mean_inputs = || -> anyhow::Result<MeanInterferenceInputs> {
        Ok(MeanInterferenceInputs {
            density: args.density.or(file.density_per_m2).ok_or_else(|| usage("the mean estimator needs --lambda"))?,
            p: args.p.or(file.p).ok_or_else(|| usage("the mean estimator needs --p"))?,
            noise_power: noise,
            near_field_radius: args.a0_m.or(file.a0_m).unwrap_or(1.0),
        })
    };

    let est = match args.algo {
        AlgoArg::Mean => estimate_ple_mean_interference(need_trace()?, &mean_inputs()?, SearchBounds::default())?,
        AlgoArg::Nakagami => {
            let ms = need_trace()?;
            let inputs = mean_inputs()?;
            let mut est = estimate_ple_mean_interference(ms, &inputs, SearchBounds::default())?;
            est.m_hat = Some(estimate_nakagami_m(ms, est.gamma_hat, inputs.density, inputs.p, inputs.near_field_radius, 0.0)?);
            est
        }
        AlgoArg::Outage => estimate_ple_virtual_outage(&sirs()?, thresholds)?,
        AlgoArg::Ks => estimate_ple_ks_fit(&sirs()?, KsFitOptions { known_c: args.known_c, ..Default::default() })?,
        AlgoArg::Txset => {
            let ms = need_trace()?;
            estimate_ple_transmitting_set(transmitting_set_means(ms, thresholds)?, thresholds, ms.len())?
        }
    };
    println!("{}", serde_json::to_string_pretty(&estimate_json(&est))?);
    Ok(())
}

fn experiment(args: &ExperimentArgs, file: &RunConfig, seed: u64) -> anyhow::Result<()> {
    let name = args.name;
    let default_slots = match name {
        ExperimentName::Mobility | ExperimentName::Coordination => 2000,
        _ => 10_000,
    };
    let net = Net::resolve(&args.net, file, default_slots);
    let algorithms: Vec<Algorithm> = args
        .algos
        .clone()
        .or_else(|| file.algorithms.clone())
        .map(|v| v.into_iter().map(AlgoArg::algorithm).collect())
        .unwrap_or_else(|| match name {
            ExperimentName::VaryingPle | ExperimentName::Nonppp => vec![Algorithm::TransmittingSet],
            ExperimentName::MseVsM => vec![Algorithm::VirtualOutage, Algorithm::TransmittingSet],
            _ => vec![Algorithm::MeanInterference, Algorithm::VirtualOutage, Algorithm::TransmittingSet],
        });
    let defaults = ExperimentConfig::default();
    let thresholds = ThresholdPair::from_db(
        args.theta1_db.or(file.theta1_db).unwrap_or(10.0),
        args.theta2_db.or(file.theta2_db).unwrap_or(0.0),
    );
    let mut cfg = ExperimentConfig {
        model: net.model.build(net.density),
        window: Window::centered_square(net.window_side_m)?,
        gamma: net.gamma,
        m: net.m,
        near_field_radius: net.a0_m,
        mac: MacParams { p: net.p, noise_power: db_to_linear(net.n0_dbm), power_control: net.power_control.into() },
        n_slots: net.n_slots,
        checkpoints: args.checkpoints.clone().or_else(|| file.checkpoints.clone()).unwrap_or_else(|| DEFAULT_CHECKPOINTS.to_vec()),
        n_realizations: args.realizations.or(file.n_realizations).unwrap_or(500),
        thresholds,
        base_seed: seed,
        ..defaults
    };
    if let Some(nf) = net.near_field {
        cfg.near_field_mean = nf.into();
        cfg.near_field_sir = nf.into();
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let start = Instant::now();
    let report: ExperimentReport = match name {
        ExperimentName::MseSweep => {
            let gammas = args.gammas.clone().or_else(|| file.gammas.clone()).unwrap_or_else(|| vec![2.5, 3.0, 3.5, 4.0, 4.5]);
            run_mse_sweep(&cfg, &algorithms, &gammas)?
        }
        ExperimentName::MseVsM => {
            let ms = args.ms.clone().or_else(|| file.ms.clone()).unwrap_or_else(|| vec![1.0, 2.0, 3.0, 4.0, 5.0]);
            run_mse_vs_m(&cfg, &algorithms, &ms)?
        }
        ExperimentName::Mobility => {
            let speeds = args.speeds.clone().or_else(|| file.speeds_m_per_slot.clone()).unwrap_or_else(|| {
                vec![0.0, file.v_m_per_slot.unwrap_or(0.1)]
            });
            run_mobility_experiment(&cfg, &algorithms, &speeds)?
        }
        ExperimentName::Coordination => {
            let ks = args.observers.clone().or_else(|| file.observers.clone()).unwrap_or_else(|| vec![1, 2, 4, 8]);
            run_coordination_experiment(&cfg, &algorithms, &ks)?
        }
        ExperimentName::VaryingPle => {
            let d = TwoRegionSetup::default();
            let setup = TwoRegionSetup {
                gamma_inner: file.gamma_inner.unwrap_or(d.gamma_inner),
                gamma_outer: file.gamma_outer.unwrap_or(d.gamma_outer),
                inner_side: file.inner_side_m.unwrap_or(d.inner_side),
            };
            let xs = args.xs.clone().or_else(|| file.xs_m.clone()).unwrap_or_else(|| vec![0.0, 5.0, 10.0, 15.0, 20.0]);
            run_varying_ple_experiment(&cfg, &algorithms, setup, &xs)?
        }
        ExperimentName::Nonppp => {
            let models: Vec<_> = args
                .models
                .clone()
                .or_else(|| file.models.clone())
                .unwrap_or_else(|| vec![ModelArg::Lattice, ModelArg::Matern, ModelArg::Thomas, ModelArg::Ppp])
                .into_iter()
                .map(|m| m.build(net.density))
                .collect();
            let controls = [plesim::simcore::PowerControl::Unit, plesim::simcore::PowerControl::ExponentialUnitMean];
            run_nonppp_experiment(&cfg, &algorithms, &models, &controls)?
        }
    };

    let out_dir = args.out.clone().or_else(|| file.out_dir.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let stem = name.file_stem();
    let mut csv_out = create(&out_dir.join(format!("{stem}.csv")))?;
    report.write_csv(&mut csv_out)?;
    csv_out.flush()?;
    let mut json_out = create(&out_dir.join(format!("{stem}.json")))?;
    report.write_json(&mut json_out)?;
    json_out.flush()?;
    if file.verbose.unwrap_or(true) {
        eprintln!("{stem}: {} rows in {:.1} s -> {}", report.rows.len(), start.elapsed().as_secs_f64(), out_dir.display());
    }
    Ok(())
}

fn selftest(seed: u64) -> anyhow::Result<()> {
    let mut failures = 0;
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };
    let base = NetworkParams::new(1.0, 0.05, 1.0, 4.0);

    let mu = mean_interference(&base, 1.0)?;
    check("mean interference", (mu - 0.05 * std::f64::consts::PI).abs() < 1e-12, format_sig(mu));

    let ps = success_probability(&base, 1.0)?;
    check("success probability", (ps - 0.781344).abs() < 1e-5, format_sig(ps));

    let pair = ThresholdPair::default();
    let mut worst: f64 = 0.0;
    for step in 0..=39 {
        let gamma = 2.1 + 0.1 * step as f64;
        for m in 1..=5u32 {
            let params = NetworkParams::new(1.0, 0.05, m as f64, gamma);
            let (p1, p2) = (success_probability(&params, pair.theta1)?, success_probability(&params, pair.theta2)?);
            worst = worst.max((plesim::estimators::invert_success_probabilities(p1, p2, pair)? - gamma).abs());
            let n1 = mean_transmitting_set_cardinality(m, gamma, pair.theta1)?;
            let n2 = mean_transmitting_set_cardinality(m, gamma, pair.theta2)?;
            worst = worst.max((estimate_ple_transmitting_set((n1, n2), pair, 1)?.gamma_hat - gamma).abs());
        }
    }
    check("estimator round trips", worst < 1e-9, format!("max error {worst:.1e}"));

    let channel = ChannelParams::new(1.0, PathLossModel::single(4.0), NearFieldMode::Exclude);
    let mac = MacParams::default();
    let opts = TraceOptions {
        fresh_pattern_per_slot: true,
        observer: plesim::simcore::ObserverPolicy::InsertedAt(plesim::pointproc::Point::ORIGIN),
        ..TraceOptions::default()
    };
    let src = NodeSource::Model { model: plesim::pointproc::ProcessModel::ppp(1.0), window: Window::centered_square(50.0)? };
    let trace = run_trace(src, &channel, &mac, 20_000, opts, &mut seeded(seed))?;
    let sim = stats::mean(&trace.measurements.iter().map(|m| m.interference(mac.noise_power)).collect::<Vec<_>>());
    let theory = interference_cumulant(1, &base, 1.0, 25.0)?;
    check("simulated mean interference", (sim / theory - 1.0).abs() < 0.06, format!("{} vs {}", format_sig(sim), format_sig(theory)));

    if failures > 0 {
        bail!(anyhow!("{failures} self-test checks failed"));
    }
    Ok(())
}
