//! Method × budget × family tables.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_cell, Family};
use crate::algorithms::Method;
use crate::error::Result;

pub const SWEEP_COLUMNS: [&str; 9] =
    ["method", "d", "T", "beta", "gap", "bound", "margin", "ratio_gap_over_bound", "feasible"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub families: Vec<Family>,
    pub budgets: Vec<usize>,
    pub methods: Vec<Method>,
    /// Smoothing parameters for the smoothed families; empty means each
    /// family's default.
    pub betas: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { families: vec![Family::Ball], budgets: vec![4, 8, 16], methods: Method::suite(), betas: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub method: String,
    pub d: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub beta: Option<f64>,
    pub gap: f64,
    pub bound: f64,
    pub margin: f64,
    /// Empty when the bound is zero.
    pub ratio_gap_over_bound: Option<f64>,
    pub feasible: bool,
}

/// Run every cell; rows come back in configuration order regardless of
/// scheduling.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut jobs = Vec::new();
    for &family in &config.families {
        let betas: Vec<Option<f64>> = if family.is_smoothed() && !config.betas.is_empty() {
            config.betas.iter().map(|&b| Some(b)).collect()
        } else {
            vec![None]
        };
        for &budget in &config.budgets {
            for beta in &betas {
                for &method in &config.methods {
                    jobs.push((family, method, budget, *beta));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(family, method, budget, beta)| {
            let cell = run_cell(family, method, budget, beta)?;
            let rep = cell.verify()?;
            Ok(SweepRow {
                method: method.to_string(),
                d: cell.d,
                t: budget,
                beta: cell.beta,
                gap: rep.realized_gap,
                bound: rep.bound_value,
                margin: rep.margin,
                ratio_gap_over_bound: (rep.bound_value > 0.0).then(|| rep.realized_gap / rep.bound_value),
                feasible: cell.feasible,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if rows.is_empty() {
        w.write_record(SWEEP_COLUMNS)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
