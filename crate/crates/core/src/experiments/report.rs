use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::estimators::Algorithm;

/// Spread of the successful estimates behind one report row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub algorithm: Algorithm,
    pub model: String,
    pub gamma_true: f64,
    pub m: f64,
    /// The swept quantity of the experiment (x, K, v or m); `None` for plain sweeps.
    pub param: Option<f64>,
    pub n_slots: usize,
    pub n_realizations: usize,
    /// `mean((γ̂ - γ)²) / γ` over successful estimates; NaN when all failed.
    pub rel_mse: f64,
    pub bias: f64,
    pub failure_rate: f64,
    pub quantiles: Option<Quantiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
}

pub const CSV_HEADER: [&str; 11] = [
    "experiment",
    "algorithm",
    "model",
    "gamma_true",
    "m",
    "param",
    "n_slots",
    "n_realizations",
    "rel_mse",
    "bias",
    "failure_rate",
];

impl ExperimentReport {
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.experiment.clone(),
                r.algorithm.as_str().to_string(),
                r.model.clone(),
                r.gamma_true.to_string(),
                r.m.to_string(),
                r.param.map(|p| p.to_string()).unwrap_or_default(),
                r.n_slots.to_string(),
                r.n_realizations.to_string(),
                r.rel_mse.to_string(),
                r.bias.to_string(),
                r.failure_rate.to_string(),
            ])?;
        }
        w.flush()
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    /// First row matching the given selectors.
    pub fn find(&self, algorithm: Algorithm, param: Option<f64>, n_slots: usize) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.param == param && r.n_slots == n_slots)
    }

    pub fn rows_for(&self, algorithm: Algorithm) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.algorithm == algorithm)
    }
}
