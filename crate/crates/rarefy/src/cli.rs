//! Command-line front end.
//!
//! Settings resolve in the order defaults < config file < `RAREFY_*`
//! environment < command-line flags. Exit codes: 0 success, 1 configuration
//! error, 2 numerical abort, 3 property failure.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use rarefy_core::harness::{theoretical_rate, SweepSpec};
use rarefy_core::solver::{
    domain_for, init_well_prepared, preflight, Grid, RunControl, SimState, Solver,
};
use rarefy_core::ApproxProfile;

use crate::config::{ConfigError, RunConfig};
use crate::output::{ensure_dir, write_csv, write_json, write_sidecar, write_table};
use crate::solver_checks;
use crate::sweep::{self, SweepRow};
use crate::verify::{self, ProfileEvaluator, SuiteParams};

#[derive(Debug, Parser)]
#[command(
    name = "rarefy",
    version,
    about = "Vacuum rarefaction waves and the zero-dissipation limit of 1D Navier-Stokes"
)]
pub struct Cli {
    /// TOML configuration file; every key is optional.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Sweep worker threads; 0 uses every core.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Seed for the sampled property checks.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Skip the finite-difference check of the profile derivatives.
    #[arg(long, global = true)]
    pub no_selfcheck: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Tabulate the exact vacuum wave and its cut-off version.
    Wave,
    /// Tabulate the smooth approximate profile and its derivatives.
    Profile,
    /// Run the Navier-Stokes solver for one epsilon.
    Simulate,
    /// Run the epsilon ladder and fit convergence rates.
    Sweep,
    /// Run the property suites.
    Verify,
}

#[derive(Debug)]
pub enum AppError {
    Config(String),
    Numeric(String),
    Property(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 1,
            AppError::Numeric(_) => 2,
            AppError::Property(_) => 3,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Config(m) => write!(f, "configuration error: {m}"),
            AppError::Numeric(m) => write!(f, "numerical abort: {m}"),
            AppError::Property(m) => write!(f, "property failure: {m}"),
        }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Config(e.0)
    }
}

/// Output-file problems are reported as configuration errors: the usual
/// cause is an unusable `--out`.
fn io(e: impl fmt::Display) -> AppError {
    AppError::Config(e.to_string())
}

fn numeric(e: impl fmt::Display) -> AppError {
    AppError::Numeric(e.to_string())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main_with(
    args: impl IntoIterator<Item = String>,
    env: impl IntoIterator<Item = (String, String)>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match resolve(&cli, env).and_then(|cfg| dispatch(cli.command, &cfg, out)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "rarefy: {e}");
            e.exit_code()
        }
    }
}

/// The configuration after file, environment and flag overrides.
pub fn resolve(
    cli: &Cli,
    env: impl IntoIterator<Item = (String, String)>,
) -> Result<RunConfig, AppError> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), env)?;
    if let Some(dir) = &cli.out {
        cfg.out_dir = dir.to_string_lossy().into_owned();
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.no_selfcheck {
        cfg.profile.selfcheck = false;
    }
    Ok(cfg)
}

pub fn dispatch(command: Command, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), AppError> {
    let dir = PathBuf::from(&cfg.out_dir);
    ensure_dir(&dir).map_err(|e| io(format!("{}: {e}", dir.display())))?;
    match command {
        Command::Wave => cmd_wave(cfg, &dir, out),
        Command::Profile => {
            let profile = build_profile(cfg)?;
            cmd_profile(cfg, &dir, &profile, out)
        }
        Command::Simulate => cmd_simulate(cfg, &dir, out),
        Command::Sweep => cmd_sweep(cfg, &dir, out),
        Command::Verify => cmd_verify(cfg, &dir, out),
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn check_range(section: &str, lo: f64, hi: f64, samples: usize) -> Result<(), AppError> {
    if !(lo < hi) || samples < 2 {
        return Err(AppError::Config(format!(
            "{section}: need min < max and samples >= 2 (got {lo}, {hi}, {samples})"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct WaveRow {
    xi: f64,
    rho: f64,
    u: f64,
    theta: f64,
    m: f64,
    n: f64,
    rho_cut: f64,
    u_cut: f64,
    theta_cut: f64,
    m_cut: f64,
    n_cut: f64,
}

pub fn cmd_wave(cfg: &RunConfig, dir: &Path, out: &mut dyn Write) -> Result<(), AppError> {
    let w = &cfg.wave;
    check_range("wave", w.xi_min, w.xi_max, w.samples)?;
    let setup = cfg.setup()?;
    let cut = setup
        .make_cutoff(w.nu)
        .map_err(|e| AppError::Config(format!("wave.nu: {e}")))?;
    let mut max_drho = 0.0f64;
    let rows: Vec<WaveRow> = linspace(w.xi_min, w.xi_max, w.samples)
        .into_iter()
        .map(|xi| {
            let a = setup.eval_vacuum_wave(xi);
            let b = setup.eval_cutoff_wave(&cut, xi);
            max_drho = max_drho.max((b.rho - a.rho).abs());
            WaveRow {
                xi,
                rho: a.rho,
                u: a.u,
                theta: a.theta,
                m: a.m,
                n: a.n,
                rho_cut: b.rho,
                u_cut: b.u,
                theta_cut: b.theta,
                m_cut: b.m,
                n_cut: b.n,
            }
        })
        .collect();
    let path = dir.join("wave.csv");
    write_csv(&path, &rows).map_err(io)?;
    write_sidecar(
        &path,
        "wave",
        cfg,
        json!({
            "u_minus": setup.u_minus(),
            "lambda3_cut": setup.lambda3_cut(&cut),
            "lambda3_right": setup.lambda3_right(),
            "cutoff": {"nu": cut.nu, "u_nu": cut.u_nu, "theta_nu": cut.theta_nu},
            "max_abs_rho_difference": max_drho,
        }),
    )
    .map_err(io)?;
    let _ = writeln!(
        out,
        "wrote {} ({} rows); max |rho_cut - rho| = {max_drho:e}",
        path.display(),
        rows.len()
    );
    Ok(())
}

pub fn build_profile(cfg: &RunConfig) -> Result<ApproxProfile, AppError> {
    let setup = cfg.setup()?;
    let cut = setup
        .make_cutoff(cfg.profile.nu)
        .map_err(|e| AppError::Config(format!("profile.nu: {e}")))?;
    ApproxProfile::new(setup, cut, cfg.profile.delta)
        .map_err(|e| AppError::Config(format!("profile.delta: {e}")))
}

#[derive(Serialize)]
struct ProfileRow {
    x: f64,
    rho: f64,
    u: f64,
    theta: f64,
    rho_x: f64,
    u_x: f64,
    theta_x: f64,
    rho_xx: f64,
    u_xx: f64,
    theta_xx: f64,
}

/// Tabulates `eval` at the configured time. Unless disabled, the
/// derivative columns are first checked against finite differences of the
/// value columns; a mismatch is a property failure.
pub fn cmd_profile(
    cfg: &RunConfig,
    dir: &Path,
    eval: &dyn ProfileEvaluator,
    out: &mut dyn Write,
) -> Result<(), AppError> {
    let p = &cfg.profile;
    check_range("profile", p.x_min, p.x_max, p.samples)?;
    if !(p.t >= 0.0) {
        return Err(AppError::Config(format!(
            "profile.t: expected t >= 0, got {}",
            p.t
        )));
    }
    let xs = linspace(p.x_min, p.x_max, p.samples);
    let mut selfcheck = serde_json::Value::Null;
    if p.selfcheck {
        let stride = (xs.len() / 200).max(1);
        let points: Vec<(f64, f64)> = xs.iter().step_by(stride).map(|&x| (x, p.t)).collect();
        let worst = verify::derivative_agreement(eval, &points).map_err(numeric)?;
        selfcheck = json!({"points": points.len(), "max_relative_error": worst, "tolerance": 1e-6});
        if !(worst <= 1e-6) {
            return Err(AppError::Property(format!(
                "profile derivative self-check: relative error {worst:e} > 1e-6"
            )));
        }
    }
    let rows = xs
        .iter()
        .map(|&x| {
            let q = eval.eval(x, p.t)?;
            Ok(ProfileRow {
                x,
                rho: q.rho,
                u: q.u,
                theta: q.theta,
                rho_x: q.rho_x,
                u_x: q.u_x,
                theta_x: q.theta_x,
                rho_xx: q.rho_xx,
                u_xx: q.u_xx,
                theta_xx: q.theta_xx,
            })
        })
        .collect::<rarefy_core::Result<Vec<_>>>()
        .map_err(numeric)?;
    let path = dir.join("profile.csv");
    write_csv(&path, &rows).map_err(io)?;
    write_sidecar(
        &path,
        "profile",
        cfg,
        json!({"t": p.t, "selfcheck": selfcheck}),
    )
    .map_err(io)?;
    let _ = writeln!(out, "wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}

#[derive(Serialize)]
struct SnapshotRow {
    x: f64,
    rho: f64,
    u: f64,
    theta: f64,
    m: f64,
    n: f64,
}

fn write_snapshot(
    dir: &Path,
    index: usize,
    s: &SimState,
    cfg: &RunConfig,
    meta: serde_json::Value,
) -> Result<PathBuf, AppError> {
    let rows: Vec<SnapshotRow> = (0..s.n_cells())
        .map(|i| {
            let p = s.primitive(i);
            SnapshotRow {
                x: s.grid.center(i),
                rho: p.rho,
                u: p.u,
                theta: p.theta,
                m: s.mom[i + s.grid.n_ghost()],
                n: p.rho * p.theta,
            }
        })
        .collect();
    let path = dir.join(format!("snapshot_{index:03}.csv"));
    write_csv(&path, &rows).map_err(io)?;
    write_sidecar(
        &path,
        "simulate",
        cfg,
        json!({"t": s.t, "eps": s.eps, "run": meta}),
    )
    .map_err(io)?;
    Ok(path)
}

pub fn cmd_simulate(cfg: &RunConfig, dir: &Path, out: &mut dyn Write) -> Result<(), AppError> {
    let sim = &cfg.simulate;
    let setup = cfg.setup()?;
    let schedule = cfg.schedule()?;
    let params = schedule
        .params(sim.eps, setup.right().rho)
        .map_err(|e| AppError::Config(format!("simulate.eps / schedule: {e}")))?;
    if params.warn {
        let _ = writeln!(out, "warning: schedule gives nu = {} >= 1", params.nu);
    }
    let cut = setup
        .make_cutoff(params.nu)
        .map_err(|e| AppError::Config(format!("schedule: {e}")))?;
    let profile = ApproxProfile::new(setup, cut, params.delta)
        .map_err(|e| AppError::Config(format!("schedule: {e}")))?;
    let t_span = sim.t_end.max(1.0);
    let (lo, hi) = domain_for(&setup, t_span, cfg.solver.domain_margin);
    let grid = Grid::new(lo, hi, sim.n_cells)
        .map_err(|e| AppError::Config(format!("simulate.n_cells: {e}")))?;
    preflight(&grid, &setup, t_span, cfg.solver.domain_margin)
        .map_err(|e| AppError::Config(e.to_string()))?;
    let state = init_well_prepared(grid, &profile, sim.eps)
        .map_err(|e| AppError::Config(format!("simulate.eps: {e}")))?;

    let mut solver_cfg = cfg.solver_config(cfg.solver.integrator);
    solver_cfg.t_end = sim.t_end;
    solver_cfg.snapshot_times = sim.snapshot_times.clone();
    let mut solver = Solver::new(*setup.gas(), solver_cfg)
        .map_err(|e| AppError::Config(format!("solver: {e}")))?;
    let start = std::time::Instant::now();
    let (traj, failure) = match solver.run(state, &mut |_| RunControl::Continue) {
        Ok(t) => (t, None),
        Err((e, t)) => (t, Some(e)),
    };
    let d = &traj.diagnostics;
    let meta = json!({
        "nu": params.nu,
        "delta": params.delta,
        "n_cells": grid.n_cells(),
        "domain": [lo, hi],
        "steps": d.steps,
        "dt": {"min": d.dt_min(), "max": d.dt_max(), "mean": d.dt_mean()},
        "min_rho": d.min_rho,
        "min_theta": d.min_theta,
        "conservation": {
            "totals_start": d.totals_start,
            "totals_end": d.totals_end,
            "accumulated_flux": d.accumulated_flux,
            "drift": d.conservation_drift(),
            "max_step_defect": d.max_step_defect,
        },
        "completed": traj.completed,
        "error": failure.as_ref().map(|e| e.to_string()),
    });
    let mut files = Vec::new();
    for (k, s) in traj.snapshots.iter().enumerate() {
        files.push(write_snapshot(dir, k, s, cfg, meta.clone())?);
    }
    let mut summary = meta.clone();
    summary["snapshots"] = json!(files
        .iter()
        .zip(&traj.snapshots)
        .map(|(f, s)| json!({"file": f.file_name().map(|n| n.to_string_lossy().into_owned()), "t": s.t}))
        .collect::<Vec<_>>());
    summary["config"] = cfg.to_json();
    write_json(&dir.join("simulate.json"), &summary).map_err(io)?;
    let _ = writeln!(
        out,
        "conservation audit: relative drift {:.3e} over {} steps (boundary flux mass {:.6e}, momentum {:.6e}, energy {:.6e})",
        d.conservation_drift(),
        d.steps,
        d.accumulated_flux[0],
        d.accumulated_flux[1],
        d.accumulated_flux[2],
    );
    let _ = writeln!(
        out,
        "wrote {} snapshot(s) to {} in {:.2} s",
        files.len(),
        dir.display(),
        start.elapsed().as_secs_f64()
    );
    match failure {
        Some(e) => Err(AppError::Numeric(format!(
            "{e}; last good state kept at t = {}",
            traj.last().t
        ))),
        None => Ok(()),
    }
}

pub fn cmd_sweep(cfg: &RunConfig, dir: &Path, out: &mut dyn Write) -> Result<(), AppError> {
    let spec: SweepSpec = cfg.sweep_spec()?;
    let eps = &cfg.sweep.eps;
    rarefy_core::harness::validate_ladder(eps)
        .map_err(|e| AppError::Config(format!("sweep.eps: {e}")))?;
    for &e in eps {
        spec.schedule
            .params(e, spec.setup.right().rho)
            .map_err(|err| AppError::Config(format!("schedule at eps = {e}: {err}")))?;
    }
    let records = sweep::run_sweep(&spec, eps, cfg.workers).map_err(numeric)?;
    let rows: Vec<SweepRow> = records.iter().map(SweepRow::from).collect();
    let path = dir.join("sweep.csv");
    write_table(&path, &sweep::COLUMNS, &rows).map_err(io)?;
    let summary = sweep::summary(&spec, &records);
    write_sidecar(&path, "sweep", cfg, summary.clone()).map_err(io)?;

    let a = theoretical_rate(spec.setup.gas());
    let _ = writeln!(
        out,
        "{:>9} {:>9} {:>8} {:>11} {:>11} {:>11} {:>9}",
        "eps", "nu", "cells", "err_rho", "err_m", "err_n", "seconds"
    );
    for r in &rows {
        let _ = writeln!(
            out,
            "{:>9.2e} {:>9.4} {:>8} {:>11.4e} {:>11.4e} {:>11.4e} {:>9.1}",
            r.eps, r.nu, r.n_cells, r.err_rho, r.err_m, r.err_n, r.wall_seconds
        );
    }
    let _ = writeln!(out, "theoretical rate a = {a:.6}");
    for f in ["rho", "m", "n"] {
        let fit = &summary["fits"][f];
        if fit.is_string() {
            let _ = writeln!(out, "fit {f}: {}", fit.as_str().unwrap_or_default());
        } else {
            let _ = writeln!(
                out,
                "fit {f}: plain b = {}, log-corrected b = {}",
                fit["plain"]["b"], fit["log_corrected"]["b"]
            );
        }
    }
    let _ = writeln!(out, "wrote {}", path.display());
    let aborted: Vec<String> = records
        .iter()
        .filter_map(|r| r.aborted.as_ref().map(|m| format!("eps = {}: {m}", r.eps)))
        .collect();
    if aborted.is_empty() {
        Ok(())
    } else {
        Err(AppError::Numeric(aborted.join("; ")))
    }
}

pub fn cmd_verify(cfg: &RunConfig, dir: &Path, out: &mut dyn Write) -> Result<(), AppError> {
    let params = SuiteParams {
        setup: cfg.setup()?,
        seed: cfg.seed,
        random_states: cfg.verify.states,
        burgers_queries: cfg.verify.burgers_queries,
    };
    let mut checks =
        verify::property_suites(&params, cfg.profile.nu, cfg.profile.delta).map_err(numeric)?;
    if cfg.verify.solver {
        checks.extend(solver_checks::solver_suite().map_err(numeric)?);
    }
    checks.sort_by_key(|c| c.criterion);
    let _ = write!(out, "{}", verify::render(&checks));
    let path = dir.join("verify.csv");
    write_csv(&path, &checks).map_err(io)?;
    write_sidecar(
        &path,
        "verify",
        cfg,
        json!({"all_pass": verify::all_pass(&checks)}),
    )
    .map_err(io)?;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(AppError::Property(failed.join(", ")))
    }
}
