//! Zero-dissipation limit experiments: parameter schedules, sup-norm errors
//! against the exact and cut-off waves, energy functionals of the
//! perturbation, and power-law rate fits.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::gas::{GasModel, PrimitiveState};
use crate::math;
use crate::profile::ApproxProfile;
use crate::solver::{self, Grid, RunControl, SimState, Solver, SolverConfig};
use crate::wave::{CutoffState, WaveSetup};
use crate::{Error, Result};

/// Exponent `a = 1 / (18 gamma + 12 alpha (gamma - 1))` of the proven rate
/// `eps^a |ln eps|`.
pub fn theoretical_rate(gas: &GasModel) -> f64 {
    let g = gas.gamma();
    1.0 / (18.0 * g + 12.0 * gas.alpha() * (g - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleMode {
    /// `nu = eps^a |ln eps|`, `delta = eps^a`. Only meaningful for tiny `eps`.
    PaperAsymptotic,
    /// `nu = delta = eps^b` with `0 < b < 1`.
    Practical { b: f64 },
}

/// Couples the cut-off density `nu` and the Burgers width `delta` to `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub a: f64,
    pub mode: ScheduleMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    pub nu: f64,
    pub delta: f64,
    /// Set when `nu >= 1`: the asymptotic schedule is outside its useful range.
    pub warn: bool,
}

impl Schedule {
    pub fn for_gas(gas: &GasModel, mode: ScheduleMode) -> Result<Self> {
        if let ScheduleMode::Practical { b } = mode {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "b",
                    value: b,
                    expected: "0 < b < 1",
                });
            }
        }
        Ok(Self {
            a: theoretical_rate(gas),
            mode,
        })
    }

    pub fn practical(gas: &GasModel, b: f64) -> Result<Self> {
        Self::for_gas(gas, ScheduleMode::Practical { b })
    }

    /// `(nu, delta)` at `eps`; fails when `nu >= rho_plus`.
    pub fn params(&self, eps: f64, rho_plus: f64) -> Result<ScheduleParams> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                expected: "0 < eps < 1",
            });
        }
        let (nu, delta) = match self.mode {
            ScheduleMode::PaperAsymptotic => {
                let d = math::powf(eps, self.a);
                (d * math::ln(eps).abs(), d)
            }
            ScheduleMode::Practical { b } => {
                let d = math::powf(eps, b);
                (d, d)
            }
        };
        if nu >= rho_plus {
            return Err(Error::Schedule { nu, rho_plus });
        }
        Ok(ScheduleParams {
            nu,
            delta,
            warn: nu >= 1.0,
        })
    }
}

/// Sup-norm errors in `(rho, m, n)` against the vacuum wave and the cut-off wave.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SupErrors {
    pub rho: f64,
    pub m: f64,
    pub n: f64,
    pub rho_cut: f64,
    pub m_cut: f64,
    pub n_cut: f64,
}

impl SupErrors {
    pub fn max(self, o: Self) -> Self {
        Self {
            rho: self.rho.max(o.rho),
            m: self.m.max(o.m),
            n: self.n.max(o.n),
            rho_cut: self.rho_cut.max(o.rho_cut),
            m_cut: self.m_cut.max(o.m_cut),
            n_cut: self.n_cut.max(o.n_cut),
        }
    }
}

/// Interior cells that are at least `margin * width` away from both ends.
fn measured_cells(grid: &Grid, margin: f64) -> impl Iterator<Item = usize> + '_ {
    let lo = grid.x_left() + margin * grid.width();
    let hi = grid.x_right() - margin * grid.width();
    (0..grid.n_cells()).filter(move |&i| {
        let x = grid.center(i);
        x >= lo && x <= hi
    })
}

/// Pointwise errors at cell centers against the self-similar waves at
/// `xi = x / t`, for `t >= l > 0`, skipping a boundary `margin` per side.
pub fn sup_errors(
    state: &SimState,
    setup: &WaveSetup,
    cutoff: &CutoffState,
    l: f64,
    margin: f64,
) -> Result<SupErrors> {
    let t = state.t;
    if !(t > 0.0) {
        return Err(Error::Domain {
            what: "self-similar wave at t <= 0",
            value: t,
        });
    }
    if !(l > 0.0) || t < l {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            expected: "t >= l > 0",
        });
    }
    let mut e = SupErrors::default();
    for i in measured_cells(&state.grid, margin) {
        let xi = state.grid.center(i) / t;
        let p = state.primitive(i);
        let (m, n) = (p.momentum(), p.rho_theta());
        let a = setup.eval_vacuum_wave(xi);
        let b = setup.eval_cutoff_wave(cutoff, xi);
        e.rho = e.rho.max((p.rho - a.rho).abs());
        e.m = e.m.max((m - a.m).abs());
        e.n = e.n.max((n - a.n).abs());
        e.rho_cut = e.rho_cut.max((p.rho - b.rho).abs());
        e.m_cut = e.m_cut.max((m - b.m).abs());
        e.n_cut = e.n_cut.max((n - b.n).abs());
    }
    Ok(e)
}

/// Weighted norms of the perturbation `(phi, psi, zeta) = (rho, u, theta) - profile`
/// in the scaled variable `y = x / eps`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyFunctionals {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl EnergyFunctionals {
    pub fn max(self, o: Self) -> Self {
        Self {
            e1: self.e1.max(o.e1),
            e2: self.e2.max(o.e2),
            e3: self.e3.max(o.e3),
        }
    }
}

/// Energy functionals of a solution against matching profile samples on a
/// uniform grid of spacing `dx`:
///
/// ```text
/// E1 = sum (rb^(g-2) phi^2 + rb psi^2 + rb^(2-g) zeta^2) dy
/// E2 = sum (tb^(2 alpha) / rb^3) phi_y^2 dy
/// E3 = sum (psi_y^2 + zeta_y^2) dy
/// ```
///
/// with `dy = dx / eps` and central differences (one-sided at the ends).
pub fn energy_functionals_from(
    gas: &GasModel,
    eps: f64,
    dx: f64,
    solution: &[PrimitiveState],
    profile: &[PrimitiveState],
) -> Result<EnergyFunctionals> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            expected: "eps > 0",
        });
    }
    let n = solution.len();
    if n != profile.len() || n < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: n as f64,
            expected: "matching sample counts, at least 2",
        });
    }
    let g = gas.gamma();
    let alpha = gas.alpha();
    let dy = dx / eps;
    let pert = |i: usize| {
        let (s, p) = (&solution[i], &profile[i]);
        [s.rho - p.rho, s.u - p.u, s.theta - p.theta]
    };
    let deriv = |i: usize, k: usize| {
        let (a, b, h) = if i == 0 {
            (1, 0, dy)
        } else if i == n - 1 {
            (n - 1, n - 2, dy)
        } else {
            (i + 1, i - 1, 2.0 * dy)
        };
        (pert(a)[k] - pert(b)[k]) / h
    };
    let mut out = EnergyFunctionals::default();
    for (i, bar) in profile.iter().enumerate() {
        let [phi, psi, zeta] = pert(i);
        let (rb, tb) = (bar.rho, bar.theta);
        out.e1 += math::powf(rb, g - 2.0) * phi * phi
            + rb * psi * psi
            + math::powf(rb, 2.0 - g) * zeta * zeta;
        let phi_y = deriv(i, 0);
        out.e2 += math::powf(tb, 2.0 * alpha) / (rb * rb * rb) * phi_y * phi_y;
        let (psi_y, zeta_y) = (deriv(i, 1), deriv(i, 2));
        out.e3 += psi_y * psi_y + zeta_y * zeta_y;
    }
    out.e1 *= dy;
    out.e2 *= dy;
    out.e3 *= dy;
    Ok(out)
}

/// Samples `profile` at the cell centers of `state` at time `state.t`.
pub fn profile_samples(state: &SimState, profile: &ApproxProfile) -> Result<Vec<PrimitiveState>> {
    let mut guess = None;
    let mut out = Vec::with_capacity(state.n_cells());
    for i in 0..state.n_cells() {
        let (p, x0) = profile.eval_warm(state.grid.center(i), state.t, guess)?;
        guess = Some(x0);
        out.push(p.state());
    }
    Ok(out)
}

/// Energy functionals of `state` against the profile at the same time.
pub fn energy_functionals(
    state: &SimState,
    profile: &ApproxProfile,
    gas: &GasModel,
) -> Result<EnergyFunctionals> {
    let prof = profile_samples(state, profile)?;
    energy_functionals_from(gas, state.eps, state.grid.dx(), &state.primitives(), &prof)
}

/// Sup-norm deviations `(|rho - rho_bar|, |u - u_bar|, |theta - theta_bar|)`.
pub fn apriori_deviation(solution: &[PrimitiveState], profile: &[PrimitiveState]) -> [f64; 3] {
    let mut d = [0.0f64; 3];
    for (s, p) in solution.iter().zip(profile) {
        d[0] = d[0].max((s.rho - p.rho).abs());
        d[1] = d[1].max((s.u - p.u).abs());
        d[2] = d[2].max((s.theta - p.theta).abs());
    }
    d
}

/// Least-squares fit of `err = C eps^b` (or `C eps^b |ln eps|`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub c: f64,
    pub b: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

pub fn fit_rate(eps: &[f64], err: &[f64], log_corrected: bool) -> Result<RateFit> {
    if eps.len() != err.len() {
        return Err(Error::Fit("eps and error columns differ in length"));
    }
    if eps.len() < 3 {
        return Err(Error::Fit("insufficient points"));
    }
    if err.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Fit("errors must be positive"));
    }
    if eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::Fit("eps must lie in (0, 1)"));
    }
    let xs: Vec<f64> = eps.iter().map(|&e| math::ln(e)).collect();
    let ys: Vec<f64> = eps
        .iter()
        .zip(err)
        .map(|(&e, &r)| {
            let y = math::ln(r);
            if log_corrected {
                y - math::ln(math::ln(e).abs())
            } else {
                y
            }
        })
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("eps values must not all coincide"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let ln_c = my - b * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (ln_c + b * x);
            r * r
        })
        .sum();
    Ok(RateFit {
        c: math::exp(ln_c),
        b,
        residual: math::sqrt(ss / n),
    })
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub eps: f64,
    pub nu: f64,
    pub delta: f64,
    pub n_cells: usize,
    pub t_measure: f64,
    pub errors: SupErrors,
    pub energy: EnergyFunctionals,
    /// Largest `(|phi|, |psi|, |zeta|)` over the measured snapshots.
    pub apriori: [f64; 3],
    pub apriori_ok: bool,
    pub steps: usize,
    pub conservation_drift: f64,
    pub wall_seconds: f64,
    /// Reason the run did not finish, if any. Error fields are NaN then.
    pub aborted: Option<String>,
}

impl SweepRecord {
    fn failed(eps: f64, reason: String) -> Self {
        let nan = f64::NAN;
        Self {
            eps,
            nu: nan,
            delta: nan,
            n_cells: 0,
            t_measure: nan,
            errors: SupErrors {
                rho: nan,
                m: nan,
                n: nan,
                rho_cut: nan,
                m_cut: nan,
                n_cut: nan,
            },
            energy: EnergyFunctionals {
                e1: nan,
                e2: nan,
                e3: nan,
            },
            apriori: [nan; 3],
            apriori_ok: false,
            steps: 0,
            conservation_drift: nan,
            wall_seconds: 0.0,
            aborted: Some(reason),
        }
    }
}

/// Fixed parameters of a sweep; only `eps` varies between runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub setup: WaveSetup,
    pub schedule: Schedule,
    /// Grid resolution: `dx <= eps / cells_per_eps`.
    pub cells_per_eps: f64,
    /// Fan edges stay this fraction of the width away from the boundaries.
    pub domain_margin: f64,
    /// Cells within this fraction of the width of a boundary are not measured.
    pub error_margin: f64,
    /// Start `l` of the measurement window.
    pub t_min: f64,
    /// Snapshot times in `[t_min, t_end]`; the last one is the run end.
    pub measure_times: Vec<f64>,
    /// Multiple of `eps^a` allowed for the sup deviation from the profile.
    pub apriori_factor: f64,
    pub solver: SolverConfig,
}

impl SweepSpec {
    pub fn new(setup: WaveSetup, schedule: Schedule) -> Self {
        Self {
            setup,
            schedule,
            cells_per_eps: 8.0,
            domain_margin: 0.1,
            error_margin: 0.05,
            t_min: 0.5,
            measure_times: vec![0.5, 0.75, 1.0],
            apriori_factor: 10.0,
            solver: SolverConfig::default(),
        }
    }

    pub fn t_end(&self) -> f64 {
        self.measure_times.iter().copied().fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cells_per_eps > 0.0) {
            return Err(Error::InvalidParameter {
                name: "cells_per_eps",
                value: self.cells_per_eps,
                expected: "cells_per_eps > 0",
            });
        }
        if !(self.domain_margin >= 0.0 && self.domain_margin < 0.5) {
            return Err(Error::InvalidParameter {
                name: "domain_margin",
                value: self.domain_margin,
                expected: "0 <= margin < 0.5",
            });
        }
        if !(self.error_margin >= 0.0 && self.error_margin < 0.5) {
            return Err(Error::InvalidParameter {
                name: "error_margin",
                value: self.error_margin,
                expected: "0 <= margin < 0.5",
            });
        }
        if !(self.t_min > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_min",
                value: self.t_min,
                expected: "t_min > 0",
            });
        }
        if self.measure_times.is_empty() {
            return Err(Error::InvalidParameter {
                name: "measure_times",
                value: 0.0,
                expected: "at least one measurement time",
            });
        }
        if let Some(&t) = self
            .measure_times
            .iter()
            .find(|&&t| !(t >= self.t_min) || !t.is_finite())
        {
            return Err(Error::InvalidParameter {
                name: "measure_times",
                value: t,
                expected: "finite times >= t_min",
            });
        }
        self.solver.validate()
    }

    /// Number of cells and the grid used at `eps`.
    pub fn grid_for(&self, eps: f64) -> Result<Grid> {
        let (xl, xr) = solver::domain_for(&self.setup, self.t_end(), self.domain_margin);
        let dx_max = eps / self.cells_per_eps;
        let n = libm::ceil((xr - xl) / dx_max) as usize;
        let grid = Grid::new(xl, xr, n.max(Grid::MIN_CELLS))?;
        solver::preflight(&grid, &self.setup, self.t_end(), self.domain_margin)?;
        Ok(grid)
    }
}

/// Checks the strictly decreasing `(0, 1)` precondition of a sweep ladder.
pub fn validate_ladder(eps: &[f64]) -> Result<()> {
    for (k, &e) in eps.iter().enumerate() {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: e,
                expected: "0 < eps < 1",
            });
        }
        if k > 0 && !(e < eps[k - 1]) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: e,
                expected: "strictly decreasing ladder",
            });
        }
    }
    Ok(())
}

/// Runs the well-prepared problem at one `eps` and measures it. Failures
/// (schedule, preflight, positivity) yield a record flagged as aborted.
/// `wall_seconds` is left at zero for the caller to fill in.
pub fn run_one(spec: &SweepSpec, eps: f64) -> SweepRecord {
    match try_run_one(spec, eps) {
        Ok(r) => r,
        Err(e) => SweepRecord::failed(eps, e.to_string()),
    }
}

fn try_run_one(spec: &SweepSpec, eps: f64) -> Result<SweepRecord> {
    spec.validate()?;
    let gas = *spec.setup.gas();
    let params = spec.schedule.params(eps, spec.setup.right().rho)?;
    let cutoff = spec.setup.make_cutoff(params.nu)?;
    let profile = ApproxProfile::new(spec.setup, cutoff, params.delta)?;
    let grid = spec.grid_for(eps)?;
    let state = solver::init_well_prepared(grid, &profile, eps)?;

    let mut cfg = spec.solver.clone();
    cfg.t_end = spec.t_end();
    cfg.snapshot_times = spec.measure_times.clone();
    let mut solver = Solver::new(gas, cfg)?;

    // Positivity monitor: the solution must stay within half of the floor.
    let (rho_floor, theta_floor) = (0.5 * cutoff.nu, 0.5 * cutoff.theta_nu);
    let mut violation = None;
    let traj = solver
        .run(state, &mut |rec| {
            if rec.min_rho < rho_floor || rec.min_theta < theta_floor {
                violation = Some((rec.min_rho, rec.min_theta));
                RunControl::Stop
            } else {
                RunControl::Continue
            }
        })
        .map_err(|(e, _)| e)?;
    if let Some((rho, theta)) = violation {
        return Err(Error::Domain {
            what: if rho < rho_floor {
                "positivity monitor: min density below nu/2"
            } else {
                "positivity monitor: min temperature below theta_nu/2"
            },
            value: if rho < rho_floor { rho } else { theta },
        });
    }

    let mut errors = SupErrors::default();
    let mut energy = EnergyFunctionals::default();
    let mut apriori = [0.0f64; 3];
    for snap in traj.snapshots.iter().filter(|s| s.t >= spec.t_min) {
        errors = errors.max(sup_errors(
            snap,
            &spec.setup,
            &cutoff,
            spec.t_min,
            spec.error_margin,
        )?);
        let prof = profile_samples(snap, &profile)?;
        let sol = snap.primitives();
        energy = energy.max(energy_functionals_from(&gas, eps, grid.dx(), &sol, &prof)?);
        let d = apriori_deviation(&sol, &prof);
        for k in 0..3 {
            apriori[k] = apriori[k].max(d[k]);
        }
    }
    let bound = spec.apriori_factor * math::powf(eps, spec.schedule.a);
    Ok(SweepRecord {
        eps,
        nu: params.nu,
        delta: params.delta,
        n_cells: grid.n_cells(),
        t_measure: traj.last().t,
        errors,
        energy,
        apriori,
        apriori_ok: apriori.iter().all(|&d| d <= bound),
        steps: traj.diagnostics.steps,
        conservation_drift: traj.diagnostics.conservation_drift(),
        wall_seconds: 0.0,
        aborted: None,
    })
}
