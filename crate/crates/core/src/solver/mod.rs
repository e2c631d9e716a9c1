//! Finite-volume solver for the 1D compressible Navier-Stokes equations
//!
//! ```text
//! rho_t + (rho u)_x = 0
//! (rho u)_t + (rho u^2 + p)_x = (eps mu(theta) u_x)_x
//! E_t + (u (E + p))_x = (eps kappa(theta) theta_x + eps mu(theta) u u_x)_x
//! ```
//!
//! with `E = rho (theta + u^2/2)`. Convective fluxes use MUSCL reconstruction
//! of `(rho, u, p)` with a slope limiter and a two-wave approximate Riemann
//! flux; viscous and heat fluxes are central at faces. Time stepping is the
//! two-stage SSP Runge-Kutta method.

mod kernel;
mod run;

use alloc::vec;
use alloc::vec::Vec;

use crate::gas::PrimitiveState;
use crate::profile::ApproxProfile;
use crate::wave::WaveSetup;
use crate::{Error, Result};

pub use kernel::{Solver, SourceFn, StepReport};
pub use run::{RunControl, RunDiagnostics, StepRecord, Trajectory};

/// Number of ghost layers on each side.
pub const N_GHOST: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_left: f64,
    x_right: f64,
    n_cells: usize,
}

impl Grid {
    pub const MIN_CELLS: usize = 16;

    pub fn new(x_left: f64, x_right: f64, n_cells: usize) -> Result<Self> {
        if !(x_left < x_right) || !x_left.is_finite() || !x_right.is_finite() {
            return Err(Error::InvalidParameter {
                name: "x_right - x_left",
                value: x_right - x_left,
                expected: "x_left < x_right",
            });
        }
        if n_cells < Self::MIN_CELLS {
            return Err(Error::InvalidParameter {
                name: "n_cells",
                value: n_cells as f64,
                expected: "at least 16 cells",
            });
        }
        Ok(Self {
            x_left,
            x_right,
            n_cells,
        })
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_ghost(&self) -> usize {
        N_GHOST
    }

    pub fn width(&self) -> f64 {
        self.x_right - self.x_left
    }

    pub fn dx(&self) -> f64 {
        self.width() / self.n_cells as f64
    }

    /// Center of interior cell `i` (`0 <= i < n_cells`).
    pub fn center(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx()
    }

    /// Center of storage slot `j`, ghosts included (may lie outside the domain).
    pub(crate) fn slot_center(&self, j: usize) -> f64 {
        self.x_left + (j as f64 - N_GHOST as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    fn storage_len(&self) -> usize {
        self.n_cells + 2 * N_GHOST
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limiter {
    Minmod,
    VanLeer,
    MonotonizedCentral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvectiveFlux {
    /// Local Lax-Friedrichs.
    Rusanov,
    Hll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Ghost cells keep the values they were initialized with.
    Fixed,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeIntegrator {
    /// Two-stage SSP Runge-Kutta for all terms; the time step obeys both
    /// the convective and the diffusive limit.
    SspRk2,
    /// Strang splitting: half a step of viscous and heat terms with
    /// Runge-Kutta-Legendre super-time-stepping, a convective SSP-RK2 step,
    /// and another viscous half step. Only the convective limit binds.
    SplitRkl2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    pub visc_safety: f64,
    pub flux: ConvectiveFlux,
    pub limiter: Limiter,
    pub boundary: BoundaryMode,
    pub integrator: TimeIntegrator,
    pub t_end: f64,
    /// Times at which the state is recorded; `t_end` is always recorded.
    pub snapshot_times: Vec<f64>,
    pub max_steps: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.45,
            visc_safety: 0.4,
            flux: ConvectiveFlux::Rusanov,
            limiter: Limiter::Minmod,
            boundary: BoundaryMode::Fixed,
            integrator: TimeIntegrator::SspRk2,
            t_end: 1.0,
            snapshot_times: Vec::new(),
            max_steps: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidParameter {
                name: "cfl",
                value: self.cfl,
                expected: "0 < cfl < 1",
            });
        }
        if !(self.visc_safety > 0.0 && self.visc_safety < 0.5) {
            return Err(Error::InvalidParameter {
                name: "visc_safety",
                value: self.visc_safety,
                expected: "0 < visc_safety < 0.5",
            });
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t_end",
                value: self.t_end,
                expected: "finite t_end >= 0",
            });
        }
        Ok(())
    }
}

/// Cell averages of `(rho, rho u, E)` including ghost layers.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub mom: Vec<f64>,
    pub en: Vec<f64>,
    pub t: f64,
    pub eps: f64,
}

impl SimState {
    /// Builds a state from point values at cell centers; ghost slots are
    /// filled from the same function evaluated at their (outside) centers.
    pub fn from_fn(grid: Grid, eps: f64, t: f64, mut f: impl FnMut(f64) -> PrimitiveState) -> Self {
        let len = grid.storage_len();
        let mut s = Self {
            grid,
            rho: vec![0.0; len],
            mom: vec![0.0; len],
            en: vec![0.0; len],
            t,
            eps,
        };
        for j in 0..len {
            s.set_slot(j, &f(grid.slot_center(j)));
        }
        s
    }

    pub(crate) fn set_slot(&mut self, j: usize, p: &PrimitiveState) {
        self.rho[j] = p.rho;
        self.mom[j] = p.rho * p.u;
        self.en[j] = p.total_energy();
    }

    /// Overwrites the ghost layers with constant far-field states.
    pub fn set_ghosts(&mut self, left: &PrimitiveState, right: &PrimitiveState) {
        let len = self.grid.storage_len();
        for j in 0..N_GHOST {
            self.set_slot(j, left);
            self.set_slot(len - 1 - j, right);
        }
    }

    pub fn n_cells(&self) -> usize {
        self.grid.n_cells
    }

    /// Primitive state of interior cell `i`.
    pub fn primitive(&self, i: usize) -> PrimitiveState {
        let j = i + N_GHOST;
        let rho = self.rho[j];
        let u = self.mom[j] / rho;
        PrimitiveState::new(rho, u, self.en[j] / rho - 0.5 * u * u)
    }

    pub fn primitives(&self) -> Vec<PrimitiveState> {
        (0..self.n_cells()).map(|i| self.primitive(i)).collect()
    }

    /// `dx`-weighted totals of mass, momentum and energy over interior cells.
    pub fn conserved_totals(&self) -> [f64; 3] {
        let dx = self.grid.dx();
        let r = N_GHOST..N_GHOST + self.n_cells();
        let sum = |v: &[f64]| v[r.clone()].iter().sum::<f64>() * dx;
        [sum(&self.rho), sum(&self.mom), sum(&self.en)]
    }

    /// Mirror image `x -> x_left + x_right - x`, `u -> -u`.
    pub fn mirrored(&self) -> Self {
        let mut m = self.clone();
        m.rho.reverse();
        m.en.reverse();
        m.mom.reverse();
        for v in &mut m.mom {
            *v = -*v;
        }
        m
    }
}

/// Domain `[x_left, x_right]` whose interior keeps the vacuum-wave fan
/// `[u_minus t_end, lambda3_right t_end]` (and the origin) at least
/// `margin` of the width away from either boundary.
pub fn domain_for(setup: &WaveSetup, t_end: f64, margin: f64) -> (f64, f64) {
    let lo = (setup.u_minus() * t_end).min(0.0);
    let hi = (setup.lambda3_right() * t_end).max(0.0);
    let span = (hi - lo).max(1e-3);
    let width = span / (1.0 - 2.0 * margin);
    (lo - margin * width, hi + margin * width)
}

/// Checks that the fan of the vacuum wave stays `margin` of the domain
/// width away from both boundaries up to `t_end`.
pub fn preflight(grid: &Grid, setup: &WaveSetup, t_end: f64, margin: f64) -> Result<()> {
    let pad = margin * grid.width();
    let left_edge = (setup.u_minus() * t_end).min(0.0);
    let right_edge = (setup.lambda3_right() * t_end).max(0.0);
    // Relative slack absorbs rounding in `domain_for`.
    let slack = 1e-12 * grid.width();
    if left_edge < grid.x_left() + pad - slack {
        return Err(Error::Preflight {
            edge: "vacuum edge u_minus * t_end",
            position: left_edge,
            limit: grid.x_left() + pad,
        });
    }
    if right_edge > grid.x_right() - pad + slack {
        return Err(Error::Preflight {
            edge: "fan edge lambda3(right) * t_end",
            position: right_edge,
            limit: grid.x_right() - pad,
        });
    }
    Ok(())
}

/// Initial data equal to the approximate profile at `t = 0`, with ghost
/// cells holding the cut-off state on the left and the right state on the right.
pub fn init_well_prepared(grid: Grid, profile: &ApproxProfile, eps: f64) -> Result<SimState> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            expected: "eps >= 0",
        });
    }
    let mut err = None;
    let mut s = SimState::from_fn(grid, eps, 0.0, |x| match profile.eval(x, 0.0) {
        Ok(p) => p.state(),
        Err(e) => {
            err.get_or_insert(e);
            PrimitiveState::new(1.0, 0.0, 1.0)
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    s.set_ghosts(&profile.cutoff().state(), &profile.setup().right());
    Ok(s)
}
