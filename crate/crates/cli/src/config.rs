//! Run configuration: defaults, then an optional JSON file, then command-line flags.

use std::path::Path;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use plesim::channel::NearFieldMode;
use plesim::estimators::Algorithm;
use plesim::pointproc::ProcessModel;
use plesim::simcore::PowerControl;

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelArg {
    Ppp,
    Lattice,
    Matern,
    Thomas,
}

impl ModelArg {
    pub fn build(self, density: f64) -> ProcessModel {
        match self {
            ModelArg::Ppp => ProcessModel::ppp(density),
            ModelArg::Lattice => ProcessModel::lattice(density),
            ModelArg::Matern => ProcessModel::matern_default(),
            ModelArg::Thomas => ProcessModel::thomas_default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerArg {
    Unit,
    Exp,
}

impl From<PowerArg> for PowerControl {
    fn from(p: PowerArg) -> Self {
        match p {
            PowerArg::Unit => PowerControl::Unit,
            PowerArg::Exp => PowerControl::ExponentialUnitMean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NearFieldArg {
    Clamp,
    Exclude,
    Off,
}

impl From<NearFieldArg> for NearFieldMode {
    fn from(n: NearFieldArg) -> Self {
        match n {
            NearFieldArg::Clamp => NearFieldMode::Clamp,
            NearFieldArg::Exclude => NearFieldMode::Exclude,
            NearFieldArg::Off => NearFieldMode::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgoArg {
    Mean,
    Outage,
    Ks,
    Txset,
    Nakagami,
}

impl AlgoArg {
    /// Estimator behind the argument; the Nakagami fit rides on the mean estimator.
    pub fn algorithm(self) -> Algorithm {
        match self {
            AlgoArg::Mean | AlgoArg::Nakagami => Algorithm::MeanInterference,
            AlgoArg::Outage => Algorithm::VirtualOutage,
            AlgoArg::Ks => Algorithm::KsFit,
            AlgoArg::Txset => Algorithm::TransmittingSet,
        }
    }
}

/// Keys accepted in a `--config` file. Every physical quantity names its unit.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<String>,
    pub verbose: Option<bool>,
    pub model: Option<ModelArg>,
    pub density_per_m2: Option<f64>,
    pub p: Option<f64>,
    pub m: Option<f64>,
    pub gamma: Option<f64>,
    pub n0_dbm: Option<f64>,
    pub window_side_m: Option<f64>,
    pub a0_m: Option<f64>,
    pub power_control: Option<PowerArg>,
    pub near_field: Option<NearFieldArg>,
    pub n_slots: Option<usize>,
    pub n_realizations: Option<usize>,
    pub checkpoints: Option<Vec<usize>>,
    pub theta1_db: Option<f64>,
    pub theta2_db: Option<f64>,
    pub v_m_per_slot: Option<f64>,
    pub algorithms: Option<Vec<AlgoArg>>,
    pub gammas: Option<Vec<f64>>,
    pub ms: Option<Vec<f64>>,
    pub speeds_m_per_slot: Option<Vec<f64>>,
    pub observers: Option<Vec<usize>>,
    pub xs_m: Option<Vec<f64>>,
    pub gamma_inner: Option<f64>,
    pub gamma_outer: Option<f64>,
    pub inner_side_m: Option<f64>,
    pub models: Option<Vec<ModelArg>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| UsageError(format!("bad config {}: {e}", path.display())))
    }
}

/// Network flags shared by `simulate` and `experiment`; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct NetFlags {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Node density λ (nodes per m²).
    #[arg(long = "lambda")]
    pub density: Option<f64>,
    /// ALOHA contention probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Nakagami shape (use `inf` for no fading).
    #[arg(long)]
    pub m: Option<f64>,
    /// Path loss exponent.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub n0_dbm: Option<f64>,
    #[arg(long = "window-m")]
    pub window_side_m: Option<f64>,
    /// Near-field radius A0 in meters.
    #[arg(long = "a0-m")]
    pub a0_m: Option<f64>,
    #[arg(long, value_enum)]
    pub power_control: Option<PowerArg>,
    #[arg(long, value_enum)]
    pub near_field: Option<NearFieldArg>,
    #[arg(long)]
    pub slots: Option<usize>,
}

/// Fully resolved network description.
#[derive(Debug, Clone)]
pub struct Net {
    pub model: ModelArg,
    pub density: f64,
    pub p: f64,
    pub m: f64,
    pub gamma: f64,
    pub n0_dbm: f64,
    pub window_side_m: f64,
    pub a0_m: f64,
    pub power_control: PowerArg,
    pub near_field: Option<NearFieldArg>,
    pub n_slots: usize,
}

impl Net {
    pub fn resolve(flags: &NetFlags, file: &RunConfig, default_slots: usize) -> Self {
        Self {
            model: flags.model.or(file.model).unwrap_or(ModelArg::Ppp),
            density: flags.density.or(file.density_per_m2).unwrap_or(1.0),
            p: flags.p.or(file.p).unwrap_or(0.05),
            m: flags.m.or(file.m).unwrap_or(1.0),
            gamma: flags.gamma.or(file.gamma).unwrap_or(4.0),
            n0_dbm: flags.n0_dbm.or(file.n0_dbm).unwrap_or(-25.0),
            window_side_m: flags.window_side_m.or(file.window_side_m).unwrap_or(50.0),
            a0_m: flags.a0_m.or(file.a0_m).unwrap_or(1.0),
            power_control: flags.power_control.or(file.power_control).unwrap_or(PowerArg::Unit),
            near_field: flags.near_field.or(file.near_field),
            n_slots: flags.slots.or(file.n_slots).unwrap_or(default_slots),
        }
    }
}
