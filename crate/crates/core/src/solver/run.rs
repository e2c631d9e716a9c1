use alloc::vec::Vec;

use super::{SimState, Solver};
use crate::Error;

/// Returned by the per-step hook of [`Solver::run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunControl {
    Continue,
    /// Stop early; the trajectory is flagged as incomplete.
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub min_rho: f64,
    pub min_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunDiagnostics {
    pub steps: usize,
    pub history: Vec<StepRecord>,
    pub min_rho: f64,
    pub min_theta: f64,
    pub totals_start: [f64; 3],
    pub totals_end: [f64; 3],
    /// Accumulated boundary inflow plus source.
    pub accumulated_flux: [f64; 3],
    /// Largest per-step `|change of totals - inflow - source|`, relative to
    /// `max(1, |totals|)`.
    pub max_step_defect: f64,
}

impl RunDiagnostics {
    /// Relative drift of `totals_end - totals_start - accumulated_flux`.
    pub fn conservation_drift(&self) -> f64 {
        (0..3)
            .map(|c| {
                let d = self.totals_end[c] - self.totals_start[c] - self.accumulated_flux[c];
                d.abs()
                    / self.totals_start[c]
                        .abs()
                        .max(self.totals_end[c].abs())
                        .max(1.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn dt_min(&self) -> f64 {
        self.history
            .iter()
            .map(|r| r.dt)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn dt_max(&self) -> f64 {
        self.history.iter().map(|r| r.dt).fold(0.0, f64::max)
    }

    pub fn dt_mean(&self) -> f64 {
        if self.history.is_empty() {
            0.0
        } else {
            self.history.iter().map(|r| r.dt).sum::<f64>() / self.history.len() as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// States at the requested snapshot times, in increasing time order.
    pub snapshots: Vec<SimState>,
    pub diagnostics: RunDiagnostics,
    /// `false` when the hook stopped the run or the step budget ran out.
    pub completed: bool,
}

impl Trajectory {
    pub fn last(&self) -> &SimState {
        self.snapshots
            .last()
            .expect("trajectory always holds a snapshot")
    }
}

impl Solver {
    /// Integrates from `state.t` to `config.t_end`, landing exactly on every
    /// snapshot time. The hook sees each completed step and may stop the run.
    ///
    /// On a numerical failure the error is returned together with the
    /// snapshots recorded so far.
    #[allow(clippy::result_large_err)]
    pub fn run(
        &mut self,
        mut state: SimState,
        hook: &mut dyn FnMut(&StepRecord) -> RunControl,
    ) -> core::result::Result<Trajectory, (Error, Trajectory)> {
        let t_end = self.config().t_end;
        let mut targets: Vec<f64> = self
            .config()
            .snapshot_times
            .iter()
            .copied()
            .filter(|&t| t > state.t && t < t_end)
            .collect();
        targets.push(t_end);
        targets.sort_by(f64::total_cmp);
        targets.dedup();

        let mut diag = RunDiagnostics {
            totals_start: state.conserved_totals(),
            min_rho: f64::INFINITY,
            min_theta: f64::INFINITY,
            ..RunDiagnostics::default()
        };
        let mut snapshots = Vec::with_capacity(targets.len());
        let max_steps = self.config().max_steps.unwrap_or(usize::MAX);

        if t_end < state.t {
            diag.totals_end = diag.totals_start;
            let e = Error::InvalidParameter {
                name: "t_end",
                value: t_end,
                expected: "t_end >= current time",
            };
            snapshots.push(state);
            return Err((
                e,
                Trajectory {
                    snapshots,
                    diagnostics: diag,
                    completed: false,
                },
            ));
        }

        let mut completed = true;
        let mut prev_totals = diag.totals_start;
        let mut next_dt = None;
        'outer: for &target in &targets {
            while state.t < target {
                if diag.steps >= max_steps {
                    completed = false;
                    break 'outer;
                }
                let dt_bound = match next_dt {
                    Some(dt) => Ok(dt),
                    None => self.stable_dt(&state),
                };
                let result = dt_bound.and_then(|dt| {
                    // Land exactly on the target; avoid a sliver step.
                    let remaining = target - state.t;
                    let dt = if dt >= remaining || remaining - dt < 1e-9 * dt {
                        remaining
                    } else {
                        dt
                    };
                    self.step(&mut state, dt)
                });
                let report = match result {
                    Ok(r) => r,
                    Err(e) => {
                        diag.totals_end = state.conserved_totals();
                        snapshots.push(state);
                        return Err((
                            e,
                            Trajectory {
                                snapshots,
                                diagnostics: diag,
                                completed: false,
                            },
                        ));
                    }
                };
                next_dt = Some(report.next_dt);
                if target - state.t < 1e-12 * target.abs().max(1.0) {
                    state.t = target;
                }
                let totals = state.conserved_totals();
                for c in 0..3 {
                    let expected = report.inflow[c] + report.source[c];
                    diag.accumulated_flux[c] += expected;
                    let defect =
                        (totals[c] - prev_totals[c] - expected).abs() / totals[c].abs().max(1.0);
                    diag.max_step_defect = diag.max_step_defect.max(defect);
                }
                prev_totals = totals;
                diag.steps += 1;
                diag.min_rho = diag.min_rho.min(report.min_rho);
                diag.min_theta = diag.min_theta.min(report.min_theta);
                let rec = StepRecord {
                    t: state.t,
                    dt: report.dt,
                    min_rho: report.min_rho,
                    min_theta: report.min_theta,
                };
                diag.history.push(rec);
                if hook(&rec) == RunControl::Stop {
                    completed = false;
                    if state.t >= target {
                        snapshots.push(state.clone());
                    }
                    break 'outer;
                }
            }
            snapshots.push(state.clone());
        }
        if !completed && snapshots.last().is_none_or(|s| s.t != state.t) {
            snapshots.push(state.clone());
        }
        diag.totals_end = state.conserved_totals();
        Ok(Trajectory {
            snapshots,
            diagnostics: diag,
            completed,
        })
    }
}
