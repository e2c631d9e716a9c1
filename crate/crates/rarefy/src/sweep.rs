//! Concurrent execution of the epsilon ladder and the fit summary.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use rarefy_core::harness::{
    fit_rate, run_one, theoretical_rate, validate_ladder, SweepRecord, SweepSpec,
};
use rarefy_core::Result;

pub const COLUMNS: [&str; 15] = [
    "eps",
    "nu",
    "delta",
    "n_cells",
    "t_measure",
    "err_rho",
    "err_m",
    "err_n",
    "err_rho_cut",
    "err_m_cut",
    "err_n_cut",
    "E1",
    "E2",
    "E3",
    "wall_seconds",
];

/// One CSV row; the field order must match [`COLUMNS`].
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub nu: f64,
    pub delta: f64,
    pub n_cells: usize,
    pub t_measure: f64,
    pub err_rho: f64,
    pub err_m: f64,
    pub err_n: f64,
    pub err_rho_cut: f64,
    pub err_m_cut: f64,
    pub err_n_cut: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    #[serde(rename = "E3")]
    pub e3: f64,
    pub wall_seconds: f64,
}

impl From<&SweepRecord> for SweepRow {
    fn from(r: &SweepRecord) -> Self {
        Self {
            eps: r.eps,
            nu: r.nu,
            delta: r.delta,
            n_cells: r.n_cells,
            t_measure: r.t_measure,
            err_rho: r.errors.rho,
            err_m: r.errors.m,
            err_n: r.errors.n,
            err_rho_cut: r.errors.rho_cut,
            err_m_cut: r.errors.m_cut,
            err_n_cut: r.errors.n_cut,
            e1: r.energy.e1,
            e2: r.energy.e2,
            e3: r.energy.e3,
            wall_seconds: r.wall_seconds,
        }
    }
}

/// Runs every `eps` on a pool of at most `workers` threads (0: one per
/// core). Records come back in ladder order whatever the completion order.
pub fn run_sweep(spec: &SweepSpec, eps: &[f64], workers: usize) -> Result<Vec<SweepRecord>> {
    validate_ladder(eps)?;
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    Ok(pool.install(|| {
        eps.par_iter()
            .with_max_len(1)
            .map(|&e| {
                let start = Instant::now();
                let mut r = run_one(spec, e);
                r.wall_seconds = start.elapsed().as_secs_f64();
                r
            })
            .collect()
    }))
}

pub const FIELDS: [&str; 9] = [
    "rho", "m", "n", "rho_cut", "m_cut", "n_cut", "E1", "E2", "E3",
];

pub fn field(r: &SweepRecord, name: &str) -> f64 {
    match name {
        "rho" => r.errors.rho,
        "m" => r.errors.m,
        "n" => r.errors.n,
        "rho_cut" => r.errors.rho_cut,
        "m_cut" => r.errors.m_cut,
        "n_cut" => r.errors.n_cut,
        "E1" => r.energy.e1,
        "E2" => r.energy.e2,
        "E3" => r.energy.e3,
        _ => f64::NAN,
    }
}

/// Whether `field` strictly decreases along the completed records.
pub fn strictly_decreasing(records: &[SweepRecord], name: &str) -> bool {
    let v: Vec<f64> = records
        .iter()
        .filter(|r| r.aborted.is_none())
        .map(|r| field(r, name))
        .collect();
    v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0])
}

/// Plain and log-corrected fits per field over the completed records.
pub fn summary(spec: &SweepSpec, records: &[SweepRecord]) -> Value {
    let done: Vec<&SweepRecord> = records.iter().filter(|r| r.aborted.is_none()).collect();
    let eps: Vec<f64> = done.iter().map(|r| r.eps).collect();
    let a = theoretical_rate(spec.setup.gas());
    let mut fits = serde_json::Map::new();
    for name in FIELDS {
        let v: Vec<f64> = done.iter().map(|r| field(r, name)).collect();
        let entry = if done.len() < 3 {
            json!("insufficient points")
        } else {
            let one = |log: bool| match fit_rate(&eps, &v, log) {
                Ok(f) => {
                    json!({"C": f.c, "b": f.b, "residual": f.residual, "b_at_least_a": f.b >= a})
                }
                Err(e) => json!(e.to_string()),
            };
            json!({
                "plain": one(false),
                "log_corrected": one(true),
                "strictly_decreasing": strictly_decreasing(records, name),
            })
        };
        fits.insert(name.to_string(), entry);
    }
    let (mode, b) = match spec.schedule.mode {
        rarefy_core::harness::ScheduleMode::PaperAsymptotic => ("paper-asymptotic", Value::Null),
        rarefy_core::harness::ScheduleMode::Practical { b } => ("practical", json!(b)),
    };
    json!({
        "theoretical_rate_a": a,
        "schedule": {"mode": mode, "b": b, "a": spec.schedule.a},
        "measure_window": {"t_min": spec.t_min, "t_end": spec.t_end(), "times": spec.measure_times},
        "cells_per_eps": spec.cells_per_eps,
        "fits": fits,
        "runs": records.iter().map(|r| json!({
            "eps": r.eps,
            "steps": r.steps,
            "conservation_drift": r.conservation_drift,
            "apriori_deviation": r.apriori,
            "apriori_ok": r.apriori_ok,
            "aborted": r.aborted,
        })).collect::<Vec<_>>(),
    })
}
