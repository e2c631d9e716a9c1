use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{
    BoundaryMode, ConvectiveFlux, Limiter, SimState, SolverConfig, TimeIntegrator, N_GHOST,
};
use crate::gas::GasModel;
use crate::math;
use crate::{Error, Result};

/// Volumetric source `(x, t) -> [mass, momentum, energy]`, sampled at cell
/// centers. Used for manufactured-solution verification.
pub type SourceFn = dyn Fn(f64, f64) -> [f64; 3] + Send + Sync;

/// Explicit solver with reusable scratch buffers.
pub struct Solver {
    gas: GasModel,
    config: SolverConfig,
    source: Option<Box<SourceFn>>,
    w: Workspace,
}

#[derive(Default)]
struct Workspace {
    u: Vec<f64>,
    theta: Vec<f64>,
    p: Vec<f64>,
    slope_rho: Vec<f64>,
    slope_u: Vec<f64>,
    slope_p: Vec<f64>,
    flux: [Vec<f64>; 3],
    base: [Vec<f64>; 3],
    // Super-time-stepping stages.
    y0: [Vec<f64>; 3],
    l0: [Vec<f64>; 3],
    ym2: [Vec<f64>; 3],
    ynew: [Vec<f64>; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    pub dt: f64,
    /// Net boundary inflow of mass, momentum and energy over the step.
    pub inflow: [f64; 3],
    /// Integrated source over the step.
    pub source: [f64; 3],
    pub min_rho: f64,
    pub min_theta: f64,
    /// Stable time step for the state after the step.
    pub next_dt: f64,
}

impl Solver {
    pub fn new(gas: GasModel, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            gas,
            config,
            source: None,
            w: Workspace::default(),
        })
    }

    pub fn with_source(mut self, source: Box<SourceFn>) -> Self {
        self.source = Some(source);
        self
    }

    pub fn gas(&self) -> &GasModel {
        &self.gas
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut SolverConfig {
        &mut self.config
    }

    fn ensure_capacity(&mut self, len: usize) {
        let w = &mut self.w;
        for v in [
            &mut w.u,
            &mut w.theta,
            &mut w.p,
            &mut w.slope_rho,
            &mut w.slope_u,
            &mut w.slope_p,
        ] {
            v.resize(len, 0.0);
        }
        for v in w
            .flux
            .iter_mut()
            .chain(w.base.iter_mut())
            .chain(w.y0.iter_mut())
            .chain(w.l0.iter_mut())
            .chain(w.ym2.iter_mut())
            .chain(w.ynew.iter_mut())
        {
            v.resize(len, 0.0);
        }
    }

    fn fill_ghosts(&self, s: &mut SimState) {
        if self.config.boundary == BoundaryMode::Periodic {
            let n = s.n_cells();
            for v in [&mut s.rho, &mut s.mom, &mut s.en] {
                for k in 0..N_GHOST {
                    v[k] = v[k + n];
                    v[N_GHOST + n + k] = v[N_GHOST + k];
                }
            }
        }
    }

    /// Fills the primitive buffers and checks positivity of interior cells.
    /// With `speeds` the convective and diffusive time-step bounds are
    /// gathered as well.
    fn primitives(&mut self, s: &SimState, speeds: bool) -> Result<CellBounds> {
        let g = self.gas.gamma();
        let gm1 = g - 1.0;
        let n = s.n_cells();
        let len = n + 2 * N_GHOST;
        self.ensure_capacity(len);
        let alpha = self.gas.alpha();
        let eps = s.eps;
        let w = &mut self.w;
        let (rho, mom, en) = (&s.rho[..len], &s.mom[..len], &s.en[..len]);
        let (wu, wt, wp) = (&mut w.u[..len], &mut w.theta[..len], &mut w.p[..len]);
        for j in 0..len {
            let inv = 1.0 / rho[j];
            let u = mom[j] * inv;
            let theta = en[j] * inv - 0.5 * u * u;
            wu[j] = u;
            wt[j] = theta;
            wp[j] = gm1 * rho[j] * theta;
        }
        let mut b = CellBounds {
            min_rho: f64::INFINITY,
            min_theta: f64::INFINITY,
            max_speed: 0.0,
            max_diff: 0.0,
        };
        let mut bad = None;
        for j in N_GHOST..N_GHOST + n {
            b.min_rho = b.min_rho.min(rho[j]);
            b.min_theta = b.min_theta.min(wt[j]);
            if bad.is_none() && !(rho[j] > 0.0 && wt[j] > 0.0) {
                bad = Some(j);
            }
        }
        if let Some(j) = bad {
            return Err(Error::NonPositive {
                cell: j - N_GHOST,
                x: s.grid.slot_center(j),
                t: s.t,
                rho: rho[j],
                theta: wt[j],
            });
        }
        if speeds {
            let k = g * gm1;
            for j in 0..len {
                let theta = wt[j];
                b.max_speed = b.max_speed.max(wu[j].abs() + math::sqrt(k * theta));
                if eps > 0.0 {
                    b.max_diff = b.max_diff.max(eps * math::pow_fast(theta, alpha) / rho[j]);
                }
            }
        }
        Ok(b)
    }

    fn dt_from(&self, b: &CellBounds, dx: f64) -> f64 {
        let mut dt = self.config.cfl * dx / b.max_speed;
        if b.max_diff > 0.0 {
            let explicit = self.config.visc_safety * dx * dx / b.max_diff;
            dt = dt.min(match self.config.integrator {
                TimeIntegrator::SspRk2 => explicit,
                // Two half steps of at most MAX_STAGES stages each.
                TimeIntegrator::SplitRkl2 => 2.0 * explicit * rkl2_gain(MAX_STAGES),
            });
        }
        dt
    }

    /// Largest stable time step for the current state.
    pub fn stable_dt(&mut self, s: &SimState) -> Result<f64> {
        let b = if self.config.boundary == BoundaryMode::Periodic {
            let mut tmp = s.clone();
            self.fill_ghosts(&mut tmp);
            self.primitives(&tmp, true)?
        } else {
            self.primitives(s, true)?
        };
        Ok(self.dt_from(&b, s.grid.dx()))
    }

    fn fluxes(&mut self, s: &SimState, viscous: bool) {
        use ConvectiveFlux::*;
        use Limiter::*;
        match (self.config.limiter, self.config.flux) {
            (Minmod, Rusanov) => self.fluxes_with::<0, 0>(s, viscous),
            (Minmod, Hll) => self.fluxes_with::<0, 1>(s, viscous),
            (VanLeer, Rusanov) => self.fluxes_with::<1, 0>(s, viscous),
            (VanLeer, Hll) => self.fluxes_with::<1, 1>(s, viscous),
            (MonotonizedCentral, Rusanov) => self.fluxes_with::<2, 0>(s, viscous),
            (MonotonizedCentral, Hll) => self.fluxes_with::<2, 1>(s, viscous),
        }
    }

    /// Face fluxes for the current primitive buffers. Face `f` separates
    /// storage slots `f + N_GHOST - 1` and `f + N_GHOST`.
    fn fluxes_with<const LIM: u8, const FLUX: u8>(&mut self, s: &SimState, viscous: bool) {
        let n = s.n_cells();
        let len = n + 2 * N_GHOST;
        let g = self.gas.gamma();
        let gm1 = g - 1.0;
        let inv_gm1 = 1.0 / gm1;
        let dx = s.grid.dx();
        let eps = s.eps;
        let alpha = self.gas.alpha();
        let w = &mut self.w;
        let rho = &s.rho[..len];
        let (u, theta, p) = (&w.u[..len], &w.theta[..len], &w.p[..len]);
        let (sr, su, sp) = (
            &mut w.slope_rho[..len],
            &mut w.slope_u[..len],
            &mut w.slope_p[..len],
        );

        for j in 1..len - 1 {
            sr[j] = limit_const::<LIM>(rho[j] - rho[j - 1], rho[j + 1] - rho[j]);
            su[j] = limit_const::<LIM>(u[j] - u[j - 1], u[j + 1] - u[j]);
            sp[j] = limit_const::<LIM>(p[j] - p[j - 1], p[j + 1] - p[j]);
        }

        let [f0, f1, f2] = &mut w.flux;
        let (f0, f1, f2) = (&mut f0[..n + 1], &mut f1[..n + 1], &mut f2[..n + 1]);
        let visc = viscous && eps > 0.0;
        let eps_dx = eps / dx;
        for f in 0..=n {
            let l = f + N_GHOST - 1;
            let r = l + 1;
            let rl = rho[l] + 0.5 * sr[l];
            let ul = u[l] + 0.5 * su[l];
            let pl = p[l] + 0.5 * sp[l];
            let rr = rho[r] - 0.5 * sr[r];
            let ur = u[r] - 0.5 * su[r];
            let pr = p[r] - 0.5 * sp[r];

            let cl = math::sqrt(g * pl / rl);
            let cr = math::sqrt(g * pr / rr);
            let ml = rl * ul;
            let mr = rr * ur;
            let el = pl * inv_gm1 + 0.5 * ml * ul;
            let er = pr * inv_gm1 + 0.5 * mr * ur;
            let fl = [ml, ml * ul + pl, ul * (el + pl)];
            let fr = [mr, mr * ur + pr, ur * (er + pr)];
            let dq = [rr - rl, mr - ml, er - el];

            let mut out = [0.0; 3];
            if FLUX == 0 {
                let a = (ul.abs() + cl).max(ur.abs() + cr);
                for k in 0..3 {
                    out[k] = 0.5 * (fl[k] + fr[k] - a * dq[k]);
                }
            } else {
                let sl = (ul - cl).min(ur - cr);
                let sr = (ul + cl).max(ur + cr);
                if sl >= 0.0 {
                    out = fl;
                } else if sr <= 0.0 {
                    out = fr;
                } else {
                    let inv = 1.0 / (sr - sl);
                    for k in 0..3 {
                        out[k] = (sr * fl[k] - sl * fr[k] + sl * sr * dq[k]) * inv;
                    }
                }
            }

            if visc {
                let theta_f = 0.5 * (theta[l] + theta[r]);
                let u_f = 0.5 * (u[l] + u[r]);
                let k = eps_dx * math::pow_fast(theta_f, alpha);
                let du = u[r] - u[l];
                out[1] -= k * du;
                out[2] -= k * (theta[r] - theta[l] + u_f * du);
            }
            f0[f] = out[0];
            f1[f] = out[1];
            f2[f] = out[2];
        }
    }

    /// Net inflow `F(left face) - F(right face)` from the current flux buffers.
    fn boundary_inflow(&self, n: usize) -> [f64; 3] {
        let f = &self.w.flux;
        [f[0][0] - f[0][n], f[1][0] - f[1][n], f[2][0] - f[2][n]]
    }

    /// Applies `U <- a * base + b * (U - dt/dx dF + dt S(t))` on interior cells
    /// and returns the integrated source `dx * sum S`.
    fn apply(&mut self, s: &mut SimState, dt: f64, t: f64, a: f64, b: f64) -> [f64; 3] {
        let n = s.n_cells();
        let dx = s.grid.dx();
        let k = dt / dx;
        let w = &self.w;
        let vals = [&mut s.rho, &mut s.mom, &mut s.en];
        for (c, v) in vals.into_iter().enumerate() {
            let v = &mut v[N_GHOST..N_GHOST + n];
            let base = &w.base[c][N_GHOST..N_GHOST + n];
            let flux = &w.flux[c][..n + 1];
            for i in 0..n {
                let upd = v[i] - k * (flux[i + 1] - flux[i]);
                v[i] = a * base[i] + b * upd;
            }
        }
        let mut src_total = [0.0; 3];
        if let Some(src) = &self.source {
            for i in 0..n {
                let j = i + N_GHOST;
                let q = src(s.grid.center(i), t);
                s.rho[j] += b * dt * q[0];
                s.mom[j] += b * dt * q[1];
                s.en[j] += b * dt * q[2];
                for c in 0..3 {
                    src_total[c] += q[c] * dx;
                }
            }
        }
        src_total
    }

    /// Both SSP-RK2 stages; returns `(boundary inflow, source)` over `dt`.
    fn ssp_stages(
        &mut self,
        s: &mut SimState,
        dt: f64,
        viscous: bool,
    ) -> Result<([f64; 3], [f64; 3])> {
        let n = s.n_cells();
        let len = n + 2 * N_GHOST;
        let t0 = s.t;
        self.w.base[0][..len].copy_from_slice(&s.rho);
        self.w.base[1][..len].copy_from_slice(&s.mom);
        self.w.base[2][..len].copy_from_slice(&s.en);
        self.primitives(s, false)?;
        self.fluxes(s, viscous);
        let in0 = self.boundary_inflow(n);
        let src0 = self.apply(s, dt, t0, 0.0, 1.0);
        self.fill_ghosts(s);
        s.t = t0 + dt;
        self.primitives(s, false)?;
        self.fluxes(s, viscous);
        let in1 = self.boundary_inflow(n);
        let src1 = self.apply(s, dt, t0 + dt, 0.5, 0.5);
        self.fill_ghosts(s);
        let mut inflow = [0.0; 3];
        let mut source = [0.0; 3];
        for c in 0..3 {
            inflow[c] = 0.5 * dt * (in0[c] + in1[c]);
            source[c] = 0.5 * dt * (src0[c] + src1[c]);
        }
        Ok((inflow, source))
    }

    /// One fused super-time-stepping stage over the viscous and heat terms.
    ///
    /// With `FIRST`, stores `L(Y0)` in `l0` and updates `s` in place to
    /// `Y1 = Y0 + c[0] L(Y0)`. Otherwise writes
    /// `Y_j = mu Y_{j-1} + nu Y_{j-2} + (1 - mu - nu) Y0 + mt L(Y_{j-1}) + gt L(Y0)`
    /// to `ynew`, with `c = [mu, nu, mt, gt]` (time step folded into `mt`, `gt`).
    /// Density has no viscous flux and is left untouched. Returns the
    /// boundary inflow rate `F(left) - F(right)`.
    fn visc_stage<const FIRST: bool>(&mut self, s: &mut SimState, c: [f64; 4]) -> Result<[f64; 3]> {
        let n = s.n_cells();
        let inv_dx = 1.0 / s.grid.dx();
        let eps_dx = s.eps * inv_dx;
        let alpha = self.gas.alpha();
        let [mu, nu, mt, gt] = c;
        let rest = 1.0 - mu - nu;
        let prim = |rho: f64, mom: f64, en: f64| {
            let inv = 1.0 / rho;
            let u = mom * inv;
            (u, en * inv - 0.5 * u * u)
        };
        let w = &mut self.w;
        let [_, l0m, l0e] = &mut w.l0;
        let [_, y0m, y0e] = &w.y0;
        let [_, ym2m, ym2e] = &w.ym2;
        let [_, outm, oute] = &mut w.ynew;
        let rho = &s.rho;
        let (mom, en) = (&mut s.mom, &mut s.en);

        let g0 = N_GHOST - 1;
        let (mut ul, mut tl) = prim(rho[g0], mom[g0], en[g0]);
        let (mut fm_prev, mut fe_prev) = (0.0, 0.0);
        let mut first = (0.0, 0.0);
        let mut bad = None;
        for f in 0..=n {
            let r = f + N_GHOST;
            let (ur, tr) = prim(rho[r], mom[r], en[r]);
            if f < n && bad.is_none() && !(rho[r] > 0.0 && tr > 0.0) {
                bad = Some((r, tr));
            }
            let k = eps_dx * math::pow_fast(0.5 * (tl + tr), alpha);
            let du = ur - ul;
            let fm = -k * du;
            let fe = -k * (tr - tl + 0.5 * (ul + ur) * du);
            if f == 0 {
                first = (fm, fe);
            } else {
                let j = r - 1;
                let lm = -(fm - fm_prev) * inv_dx;
                let le = -(fe - fe_prev) * inv_dx;
                if FIRST {
                    l0m[j] = lm;
                    l0e[j] = le;
                    mom[j] += mu * lm;
                    en[j] += mu * le;
                } else {
                    outm[j] = mu * mom[j] + nu * ym2m[j] + rest * y0m[j] + mt * lm + gt * l0m[j];
                    oute[j] = mu * en[j] + nu * ym2e[j] + rest * y0e[j] + mt * le + gt * l0e[j];
                }
            }
            fm_prev = fm;
            fe_prev = fe;
            ul = ur;
            tl = tr;
        }
        if let Some((j, theta)) = bad {
            return Err(Error::NonPositive {
                cell: j - N_GHOST,
                x: s.grid.slot_center(j),
                t: s.t,
                rho: rho[j],
                theta,
            });
        }
        Ok([0.0, first.0 - fm_prev, first.1 - fe_prev])
    }

    /// Advances only the viscous and heat terms by `tau` with the
    /// second-order Runge-Kutta-Legendre super-time-stepping scheme.
    /// Returns the boundary inflow over `tau`.
    fn diffuse(&mut self, s: &mut SimState, tau: f64) -> Result<[f64; 3]> {
        if s.eps == 0.0 {
            return Ok([0.0; 3]);
        }
        let n = s.n_cells();
        let len = n + 2 * N_GHOST;
        let dx = s.grid.dx();
        let b = self.primitives(s, true)?;
        let explicit = self.config.visc_safety * dx * dx / b.max_diff;
        let mut stages = 2;
        while explicit * rkl2_gain(stages) < tau {
            stages += 1;
        }
        let coef = Rkl2::new(stages);

        for c in 1..3 {
            let src = if c == 1 { &s.mom } else { &s.en };
            self.w.y0[c][..len].copy_from_slice(src);
            self.w.ym2[c][..len].copy_from_slice(src);
            self.w.ynew[c][..len].copy_from_slice(src);
        }
        let m1 = coef.mu_tilde(1) * tau;
        let b0 = self.visc_stage::<true>(s, [m1, 0.0, 0.0, 0.0])?;
        self.fill_ghosts(s);
        let mut i_prev2 = [0.0; 3];
        let mut i_prev = [0.0, m1 * b0[1], m1 * b0[2]];

        for j in 2..=stages {
            let (mu, nu, mt, gt) = coef.stage(j);
            let bj = self.visc_stage::<false>(s, [mu, nu, mt * tau, gt * tau])?;
            let mut i_new = [0.0; 3];
            for c in 1..3 {
                i_new[c] = mu * i_prev[c] + nu * i_prev2[c] + mt * tau * bj[c] + gt * tau * b0[c];
            }
            i_prev2 = i_prev;
            i_prev = i_new;
            // Rotate: Y_{j-2} <- Y_{j-1}, Y_{j-1} <- Y_j.
            let w = &mut self.w;
            for (c, v) in [(1, &mut s.mom), (2, &mut s.en)] {
                core::mem::swap(&mut w.ym2[c], v);
                core::mem::swap(v, &mut w.ynew[c]);
                // The recycled buffer holds stale ghost layers; restore them.
                let tail = N_GHOST + n;
                w.ynew[c][..N_GHOST].copy_from_slice(&w.y0[c][..N_GHOST]);
                w.ynew[c][tail..len].copy_from_slice(&w.y0[c][tail..len]);
            }
            self.fill_ghosts(s);
        }
        Ok(i_prev)
    }

    /// Advances `s` by one step of size `dt` with the configured integrator.
    /// On failure the state is restored to its value before the step.
    pub fn step(&mut self, s: &mut SimState, dt: f64) -> Result<StepReport> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                expected: "finite dt > 0",
            });
        }
        let n = s.n_cells();
        let len = n + 2 * N_GHOST;
        self.ensure_capacity(len);
        self.fill_ghosts(s);
        let saved = [s.rho.clone(), s.mom.clone(), s.en.clone()];
        let t0 = s.t;

        let result = (|| {
            let (inflow, source) = match self.config.integrator {
                TimeIntegrator::SspRk2 => self.ssp_stages(s, dt, true)?,
                TimeIntegrator::SplitRkl2 => {
                    let a = self.diffuse(s, 0.5 * dt)?;
                    let (h, src) = self.ssp_stages(s, dt, false)?;
                    let b = self.diffuse(s, 0.5 * dt)?;
                    (
                        [a[0] + h[0] + b[0], a[1] + h[1] + b[1], a[2] + h[2] + b[2]],
                        src,
                    )
                }
            };
            s.t = t0 + dt;
            let bounds = self.primitives(s, true)?;
            Ok(StepReport {
                dt,
                inflow,
                source,
                min_rho: bounds.min_rho,
                min_theta: bounds.min_theta,
                next_dt: self.dt_from(&bounds, s.grid.dx()),
            })
        })();

        if result.is_err() {
            let [r, m, e] = saved;
            s.rho = r;
            s.mom = m;
            s.en = e;
            s.t = t0;
        }
        result
    }

    /// One step with the stable time step.
    pub fn advance(&mut self, s: &mut SimState) -> Result<StepReport> {
        let dt = self.stable_dt(s)?;
        self.step(s, dt)
    }
}

/// Largest stage count of one super-time-stepping half step.
const MAX_STAGES: usize = 200;

/// Ratio of the stable super step to the explicit step for `s` stages.
fn rkl2_gain(s: usize) -> f64 {
    let s = s as f64;
    (s * s + s - 2.0) / 4.0
}

/// Coefficients of the `s`-stage second-order Runge-Kutta-Legendre scheme.
struct Rkl2 {
    s: usize,
    w1: f64,
}

impl Rkl2 {
    fn new(s: usize) -> Self {
        let sf = s as f64;
        Self {
            s,
            w1: 4.0 / (sf * sf + sf - 2.0),
        }
    }

    fn b(j: usize) -> f64 {
        if j < 2 {
            1.0 / 3.0
        } else {
            let j = j as f64;
            (j * j + j - 2.0) / (2.0 * j * (j + 1.0))
        }
    }

    fn mu_tilde(&self, j: usize) -> f64 {
        debug_assert!(j >= 1 && j <= self.s);
        if j == 1 {
            Self::b(1) * self.w1
        } else {
            self.stage(j).2
        }
    }

    /// `(mu_j, nu_j, mu~_j, gamma~_j)` for `j >= 2`.
    fn stage(&self, j: usize) -> (f64, f64, f64, f64) {
        let jf = j as f64;
        let mu = (2.0 * jf - 1.0) / jf * Self::b(j) / Self::b(j - 1);
        let nu = -(jf - 1.0) / jf * Self::b(j) / Self::b(j - 2);
        let mt = mu * self.w1;
        let gt = -(1.0 - Self::b(j - 1)) * mt;
        (mu, nu, mt, gt)
    }
}

#[derive(Debug, Clone, Copy)]
struct CellBounds {
    min_rho: f64,
    min_theta: f64,
    max_speed: f64,
    max_diff: f64,
}

#[inline(always)]
fn limit_const<const LIM: u8>(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        return 0.0;
    }
    match LIM {
        0 => {
            if a.abs() < b.abs() {
                a
            } else {
                b
            }
        }
        1 => 2.0 * a * b / (a + b),
        _ => {
            let m = (2.0 * a.abs()).min(2.0 * b.abs()).min(0.5 * (a + b).abs());
            if a > 0.0 {
                m
            } else {
                -m
            }
        }
    }
}
