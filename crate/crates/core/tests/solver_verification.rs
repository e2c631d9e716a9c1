//! Convergence studies of the finite-volume solver: manufactured solutions
//! on a periodic domain and self-convergence of the rarefaction problem.

use std::f64::consts::PI;

use rarefy_core::solver::{
    init_well_prepared, BoundaryMode, Grid, Limiter, RunControl, SimState, Solver, SolverConfig,
    TimeIntegrator,
};
use rarefy_core::{ApproxProfile, GasModel, PrimitiveState, WaveSetup};

/// `f0 + amp sin(k x + w t + phase)` with its derivatives.
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

struct Manufactured {
    gas: GasModel,
    eps: f64,
    rho: Wave,
    u: Wave,
    theta: Wave,
}

impl Manufactured {
    fn new(gas: GasModel, eps: f64) -> Self {
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

    fn state(&self, x: f64, t: f64) -> PrimitiveState {
        PrimitiveState::new(self.rho.v(x, t), self.u.v(x, t), self.theta.v(x, t))
    }

    /// Residual of the Navier-Stokes system for the chosen fields.
    fn source(&self, x: f64, t: f64) -> [f64; 3] {
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
        let e = r * (th + 0.5 * u * u);
        let e_t = rt * (th + 0.5 * u * u) + r * (tht + u * ut);
        let e_x = rx * (th + 0.5 * u * u) + r * (thx + u * ux);

        let mass = rt + rx * u + r * ux;
        let mom = rt * u + r * ut + rx * u * u + 2.0 * r * u * ux + p_x
            - self.eps * (mu_x * ux + mu * uxx);
        let energy = e_t + ux * (e + p) + u * (e_x + p_x)
            - self.eps * (mu_x * thx + mu * thxx + mu_x * u * ux + mu * (ux * ux + u * uxx));
        [mass, mom, energy]
    }
}

fn mms_error(eps: f64, n: usize, limiter: Limiter, integrator: TimeIntegrator) -> f64 {
    let gas = GasModel::new(1.4, 0.5).unwrap();
    let mms = std::sync::Arc::new(Manufactured::new(gas, eps));
    let grid = Grid::new(0.0, 2.0 * PI, n).unwrap();
    let t_end = 0.5;
    let s = SimState::from_fn(grid, eps, 0.0, |x| mms.state(x, 0.0));
    let cfg = SolverConfig {
        limiter,
        integrator,
        boundary: BoundaryMode::Periodic,
        t_end,
        ..SolverConfig::default()
    };
    let src = mms.clone();
    let mut solver = Solver::new(gas, cfg)
        .unwrap()
        .with_source(Box::new(move |x, t| src.source(x, t)));
    let traj = solver.run(s, &mut |_| RunControl::Continue).unwrap();
    let last = traj.last();
    let dx = grid.dx();
    (0..n)
        .map(|i| (last.primitive(i).rho - mms.state(grid.center(i), t_end).rho).abs() * dx)
        .sum()
}

fn orders(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn source_terms_match_finite_differences() {
    // The hand-derived source must equal the residual computed by central
    // differences of the conserved fluxes.
    let gas = GasModel::new(1.4, 0.5).unwrap();
    let m = Manufactured::new(gas, 0.05);
    let h = 1e-4;
    let g1 = gas.gamma() - 1.0;
    let cons = |x: f64, t: f64| {
        let s = m.state(x, t);
        [s.rho, s.rho * s.u, s.total_energy()]
    };
    let flux = |x: f64, t: f64| {
        let s = m.state(x, t);
        let p = g1 * s.rho * s.theta;
        let mu = s.theta.powf(gas.alpha());
        let ux = m.u.x(x, t);
        let thx = m.theta.x(x, t);
        [
            s.rho * s.u,
            s.rho * s.u * s.u + p - m.eps * mu * ux,
            s.u * (s.total_energy() + p) - m.eps * (mu * thx + mu * s.u * ux),
        ]
    };
    for &(x, t) in &[(0.3, 0.1), (2.0, 0.7), (5.5, 1.3)] {
        let src = m.source(x, t);
        let (ca, cb) = (cons(x, t + h), cons(x, t - h));
        let (fa, fb) = (flux(x + h, t), flux(x - h, t));
        for c in 0..3 {
            let fd = (ca[c] - cb[c]) / (2.0 * h) + (fa[c] - fb[c]) / (2.0 * h);
            assert!(
                (fd - src[c]).abs() < 1e-6,
                "component {c}: {fd} vs {}",
                src[c]
            );
        }
    }
}

#[test]
fn manufactured_inviscid_second_order() {
    // Minmod clips smooth extrema, so the asymptotic range starts later
    // than for the viscous case.
    let errs: Vec<f64> = [256, 512, 1024]
        .iter()
        .map(|&n| mms_error(0.0, n, Limiter::Minmod, TimeIntegrator::SspRk2))
        .collect();
    let ord = orders(&errs);
    assert!(ord.iter().all(|&o| o >= 1.8), "{errs:?} {ord:?}");
}

#[test]
fn manufactured_viscous_second_order() {
    for integrator in [TimeIntegrator::SspRk2, TimeIntegrator::SplitRkl2] {
        let errs: Vec<f64> = [64, 128, 256, 512]
            .iter()
            .map(|&n| mms_error(0.05, n, Limiter::Minmod, integrator))
            .collect();
        let ord = orders(&errs);
        assert!(
            ord.iter().skip(1).all(|&o| o >= 1.8),
            "{integrator:?} {errs:?} {ord:?}"
        );
    }
}

fn rarefaction(n: usize, cfl: f64) -> SimState {
    let gas = GasModel::new(1.4, 0.5).unwrap();
    let setup = WaveSetup::new(gas, PrimitiveState::new(1.0, 0.0, 1.0)).unwrap();
    let cut = setup.make_cutoff(0.2).unwrap();
    let profile = ApproxProfile::new(setup, cut, 0.1).unwrap();
    let grid = Grid::new(-3.0, 1.5, n).unwrap();
    let s = init_well_prepared(grid, &profile, 2e-2).unwrap();
    let cfg = SolverConfig {
        cfl,
        visc_safety: 0.4 * cfl / 0.45,
        integrator: TimeIntegrator::SplitRkl2,
        t_end: 0.5,
        ..SolverConfig::default()
    };
    let mut solver = Solver::new(gas, cfg).unwrap();
    solver
        .run(s, &mut |_| RunControl::Continue)
        .unwrap()
        .last()
        .clone()
}

/// Conservative restriction of a fine solution onto `n` coarse cells.
fn restrict(fine: &SimState, n: usize) -> Vec<f64> {
    let r = fine.n_cells() / n;
    (0..n)
        .map(|i| (0..r).map(|k| fine.primitive(i * r + k).rho).sum::<f64>() / r as f64)
        .collect()
}

fn sup_diff(a: &SimState, reference: &[f64]) -> f64 {
    (0..a.n_cells())
        .map(|i| (a.primitive(i).rho - reference[i]).abs())
        .fold(0.0, f64::max)
}

#[test]
fn rarefaction_self_convergence_and_time_refinement() {
    let fine = rarefaction(3200, 0.45);
    let ns = [100, 200, 400];
    let runs: Vec<SimState> = ns.iter().map(|&n| rarefaction(n, 0.45)).collect();
    let errs: Vec<f64> = runs
        .iter()
        .zip(ns)
        .map(|(s, n)| sup_diff(s, &restrict(&fine, n)))
        .collect();
    let ord = orders(&errs);
    assert!(ord.iter().all(|&o| o >= 1.0), "{errs:?} {ord:?}");

    // Halving the time step changes the solution less than the spatial error.
    let half = rarefaction(200, 0.225);
    let mut dt_change = 0.0f64;
    for i in 0..200 {
        dt_change = dt_change.max((half.primitive(i).rho - runs[1].primitive(i).rho).abs());
    }
    assert!(dt_change < 0.5 * errs[1], "{dt_change} vs {}", errs[1]);
}

#[test]
fn long_run_conservation_audit() {
    let gas = GasModel::new(1.4, 0.5).unwrap();
    let setup = WaveSetup::new(gas, PrimitiveState::new(1.0, 0.0, 1.0)).unwrap();
    let cut = setup.make_cutoff(0.1).unwrap();
    let profile = ApproxProfile::new(setup, cut, 0.1).unwrap();
    let grid = Grid::new(-5.0, 2.0, 2000).unwrap();
    let s = init_well_prepared(grid, &profile, 1e-2).unwrap();
    let cfg = SolverConfig {
        t_end: 100.0,
        max_steps: Some(10_000),
        ..SolverConfig::default()
    };
    let mut solver = Solver::new(gas, cfg).unwrap();
    let traj = solver.run(s, &mut |_| RunControl::Continue).unwrap();
    assert_eq!(traj.diagnostics.steps, 10_000);
    assert!(!traj.completed);
    assert!(traj.diagnostics.conservation_drift() <= 1e-10);
    assert!(traj.diagnostics.max_step_defect <= 1e-12);
    // Mass actually flows in through the boundaries, so the audit is not vacuous.
    assert!(traj.diagnostics.accumulated_flux[0].abs() > 1e-3);
}
