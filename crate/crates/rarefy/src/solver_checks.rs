//! Verification of the finite-volume solver: uniform states, conservation,
//! self-convergence on the rarefaction problem and manufactured solutions.

use std::f64::consts::PI;
use std::sync::Arc;

use rarefy_core::solver::{
    init_well_prepared, BoundaryMode, Grid, Limiter, RunControl, SimState, Solver, SolverConfig,
    TimeIntegrator,
};
use rarefy_core::{ApproxProfile, GasModel, PrimitiveState, Result, WaveSetup};

use crate::verify::Check;

const CRITERION: u8 = 5;

/// `f0 + amp sin(k x + w t + phase)`.
#[derive(Clone, Copy)]
struct Wave {
    f0: f64,
    amp: f64,
    k: f64,
    w: f64,
    phase: f64,
}

impl Wave {
    fn arg(&self, x: f64, t: f64) -> f64 {
        self.k * x + self.w * t + self.phase
    }
    fn v(&self, x: f64, t: f64) -> f64 {
        self.f0 + self.amp * self.arg(x, t).sin()
    }
    fn t(&self, x: f64, t: f64) -> f64 {
        self.amp * self.w * self.arg(x, t).cos()
    }
    fn x(&self, x: f64, t: f64) -> f64 {
        self.amp * self.k * self.arg(x, t).cos()
    }
    fn xx(&self, x: f64, t: f64) -> f64 {
        -self.amp * self.k * self.k * self.arg(x, t).sin()
    }
}

/// Smooth periodic fields and the source that makes them an exact solution.
pub struct Manufactured {
    gas: GasModel,
    eps: f64,
    rho: Wave,
    u: Wave,
    theta: Wave,
}

impl Manufactured {
    pub fn new(gas: GasModel, eps: f64) -> Self {
        Self {
            gas,
            eps,
            rho: Wave {
                f0: 1.0,
                amp: 0.2,
                k: 1.0,
                w: -1.0,
                phase: 0.0,
            },
            u: Wave {
                f0: 0.5,
                amp: 0.1,
                k: 1.0,
                w: 0.5,
                phase: 0.3,
            },
            theta: Wave {
                f0: 1.0,
                amp: 0.15,
                k: 2.0,
                w: -0.7,
                phase: 1.1,
            },
        }
    }

    pub fn state(&self, x: f64, t: f64) -> PrimitiveState {
        PrimitiveState::new(self.rho.v(x, t), self.u.v(x, t), self.theta.v(x, t))
    }

    pub fn source(&self, x: f64, t: f64) -> [f64; 3] {
        let g1 = self.gas.gamma() - 1.0;
        let a = self.gas.alpha();
        let (r, rt, rx) = (self.rho.v(x, t), self.rho.t(x, t), self.rho.x(x, t));
        let (u, ut, ux, uxx) = (
            self.u.v(x, t),
            self.u.t(x, t),
            self.u.x(x, t),
            self.u.xx(x, t),
        );
        let (th, tht, thx, thxx) = (
            self.theta.v(x, t),
            self.theta.t(x, t),
            self.theta.x(x, t),
            self.theta.xx(x, t),
        );
        let mu = th.powf(a);
        let mu_x = a * th.powf(a - 1.0) * thx;
        let p = g1 * r * th;
        let p_x = g1 * (rx * th + r * thx);
        let k = th + 0.5 * u * u;
        let e = r * k;
        let e_t = rt * k + r * (tht + u * ut);
        let e_x = rx * k + r * (thx + u * ux);
        [
            rt + rx * u + r * ux,
            rt * u + r * ut + rx * u * u + 2.0 * r * u * ux + p_x
                - self.eps * (mu_x * ux + mu * uxx),
            e_t + ux * (e + p) + u * (e_x + p_x)
                - self.eps * (mu_x * thx + mu * thxx + mu_x * u * ux + mu * (ux * ux + u * uxx)),
        ]
    }
}

fn gas() -> GasModel {
    GasModel::new(1.4, 0.5).expect("valid gas")
}

/// L1 density error of the manufactured solution at `t = 0.5` on `n` cells.
pub fn mms_error(eps: f64, n: usize, integrator: TimeIntegrator) -> Result<f64> {
    let gas = gas();
    let mms = Arc::new(Manufactured::new(gas, eps));
    let grid = Grid::new(0.0, 2.0 * PI, n)?;
    let t_end = 0.5;
    let s = SimState::from_fn(grid, eps, 0.0, |x| mms.state(x, 0.0));
    let cfg = SolverConfig {
        limiter: Limiter::Minmod,
        integrator,
        boundary: BoundaryMode::Periodic,
        t_end,
        ..SolverConfig::default()
    };
    let src = Arc::clone(&mms);
    let mut solver = Solver::new(gas, cfg)?.with_source(Box::new(move |x, t| src.source(x, t)));
    let traj = solver
        .run(s, &mut |_| RunControl::Continue)
        .map_err(|(e, _)| e)?;
    let last = traj.last();
    Ok((0..n)
        .map(|i| (last.primitive(i).rho - mms.state(grid.center(i), t_end).rho).abs() * grid.dx())
        .sum())
}

fn min_order(errs: &[f64]) -> f64 {
    errs.windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .fold(f64::INFINITY, f64::min)
}

fn uniform_defect() -> Result<f64> {
    let mut worst = 0.0f64;
    for integrator in [TimeIntegrator::SspRk2, TimeIntegrator::SplitRkl2] {
        let grid = Grid::new(0.0, 1.0, 64)?;
        let mut s = SimState::from_fn(grid, 1e-2, 0.0, |_| PrimitiveState::new(0.7, 0.4, 1.3));
        let cfg = SolverConfig {
            integrator,
            flux: rarefy_core::solver::ConvectiveFlux::Hll,
            ..SolverConfig::default()
        };
        let mut solver = Solver::new(gas(), cfg)?;
        for _ in 0..100 {
            let before = s.clone();
            solver.advance(&mut s)?;
            for (a, b) in [
                (&s.rho, &before.rho),
                (&s.mom, &before.mom),
                (&s.en, &before.en),
            ] {
                for (x, y) in a.iter().zip(b) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    Ok(worst)
}

fn conservation_drift() -> Result<(f64, f64)> {
    let gas = gas();
    let setup = WaveSetup::new(gas, PrimitiveState::new(1.0, 0.0, 1.0))?;
    let profile = ApproxProfile::new(setup, setup.make_cutoff(0.1)?, 0.1)?;
    let s = init_well_prepared(Grid::new(-5.0, 2.0, 2000)?, &profile, 1e-2)?;
    let cfg = SolverConfig {
        t_end: 100.0,
        max_steps: Some(10_000),
        ..SolverConfig::default()
    };
    let traj = Solver::new(gas, cfg)?
        .run(s, &mut |_| RunControl::Continue)
        .map_err(|(e, _)| e)?;
    Ok((
        traj.diagnostics.conservation_drift(),
        traj.diagnostics.steps as f64,
    ))
}

fn rarefaction(n: usize) -> Result<SimState> {
    let gas = gas();
    let setup = WaveSetup::new(gas, PrimitiveState::new(1.0, 0.0, 1.0))?;
    let profile = ApproxProfile::new(setup, setup.make_cutoff(0.2)?, 0.1)?;
    let s = init_well_prepared(Grid::new(-3.0, 1.5, n)?, &profile, 2e-2)?;
    let cfg = SolverConfig {
        integrator: TimeIntegrator::SplitRkl2,
        t_end: 0.5,
        ..SolverConfig::default()
    };
    let traj = Solver::new(gas, cfg)?
        .run(s, &mut |_| RunControl::Continue)
        .map_err(|(e, _)| e)?;
    Ok(traj.last().clone())
}

/// Sup-norm self-convergence order against a fine reference, restricted
/// conservatively onto each coarse grid.
fn self_convergence() -> Result<f64> {
    let fine = rarefaction(3200)?;
    let mut errs = Vec::new();
    for n in [100, 200, 400] {
        let coarse = rarefaction(n)?;
        let r = fine.n_cells() / n;
        let mut e = 0.0f64;
        for i in 0..n {
            let avg = (0..r).map(|k| fine.primitive(i * r + k).rho).sum::<f64>() / r as f64;
            e = e.max((coarse.primitive(i).rho - avg).abs());
        }
        errs.push(e);
    }
    Ok(min_order(&errs))
}

pub fn solver_suite() -> Result<Vec<Check>> {
    let (drift, steps) = conservation_drift()?;
    let inviscid: Vec<f64> = [256, 512, 1024]
        .iter()
        .map(|&n| mms_error(0.0, n, TimeIntegrator::SspRk2))
        .collect::<Result<_>>()?;
    let mut checks = vec![
        Check::at_most(
            CRITERION,
            "solver: uniform state change per step",
            uniform_defect()?,
            1e-14,
        ),
        Check::at_most(CRITERION, "solver: conservation drift", drift, 1e-10),
        Check::at_least(CRITERION, "solver: steps in drift audit", steps, 1e4),
        Check::at_least(
            CRITERION,
            "solver: self-convergence order (sup)",
            self_convergence()?,
            1.0,
        ),
        Check::at_least(
            CRITERION,
            "solver: manufactured order, inviscid (L1)",
            min_order(&inviscid),
            1.8,
        ),
    ];
    for (name, integrator) in [
        ("ssp-rk2", TimeIntegrator::SspRk2),
        ("split-rkl2", TimeIntegrator::SplitRkl2),
    ] {
        let errs: Vec<f64> = [128, 256, 512]
            .iter()
            .map(|&n| mms_error(0.05, n, integrator))
            .collect::<Result<_>>()?;
        checks.push(Check::at_least(
            CRITERION,
            format!("solver: manufactured order, viscous {name} (L1)"),
            min_order(&errs),
            1.8,
        ));
    }
    Ok(checks)
}
