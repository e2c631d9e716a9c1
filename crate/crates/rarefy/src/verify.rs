//! Property suites. Each returns a list of [`Check`]s with the measured
//! value, the bound it is held to, and a verdict; `rarefy verify` prints them
//! as a table and the acceptance tests assert on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rarefy_core::burgers::BurgersProfile;
use rarefy_core::harness::{fit_rate, theoretical_rate};
use rarefy_core::{ApproxProfile, GasModel, PrimitiveState, ProfileState, Result, WaveSetup};

use crate::oracle;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub value: f64,
    /// Human-readable bound, e.g. `<= 1e-11`.
    pub bound: String,
    pub pass: bool,
    /// Reported for context only; never fails.
    pub informational: bool,
}

impl Check {
    pub fn at_most(criterion: u8, name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            bound: format!("<= {limit:e}"),
            pass: value <= limit,
            informational: false,
        }
    }

    pub fn at_least(criterion: u8, name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            bound: format!(">= {limit}"),
            pass: value >= limit,
            informational: false,
        }
    }

    pub fn above(criterion: u8, name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            bound: format!("> {limit}"),
            pass: value > limit,
            informational: false,
        }
    }

    pub fn info(criterion: u8, name: impl Into<String>, value: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            bound: "info".into(),
            pass: true,
            informational: true,
        }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// Fixed-width table, one check per line.
pub fn render(checks: &[Check]) -> String {
    let width = checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(4)
        .max(5);
    let mut out = format!(
        "{:<2}  {:<width$}  {:>13}  {:<12}  {}\n",
        "#", "check", "value", "bound", "verdict"
    );
    for c in checks {
        let verdict = match (c.informational, c.pass) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        out.push_str(&format!(
            "{:<2}  {:<width$}  {:>13.6e}  {:<12}  {}\n",
            c.criterion, c.name, c.value, c.bound, verdict
        ));
    }
    out
}

/// Sample sizes and the setup the suites run on.
#[derive(Debug, Clone)]
pub struct SuiteParams {
    pub setup: WaveSetup,
    pub seed: u64,
    pub random_states: usize,
    pub burgers_queries: usize,
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Riemann invariants across the exact fan, and the closed-form invariant
/// against quadrature on random states.
pub fn riemann_suite(p: &SuiteParams) -> Result<Vec<Check>> {
    let setup = &p.setup;
    let gas = setup.gas();
    let right = setup.right();
    let sigma = gas.sigma3(&right);
    let (lo, hi) = (setup.u_minus(), setup.lambda3_right());
    let n = 1000;
    let (mut d_sigma, mut d_entropy, mut d_lambda, mut d_newton) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 1..=n {
        let xi = lo + (hi - lo) * k as f64 / n as f64;
        let s = setup.fan_state(xi);
        d_sigma = d_sigma.max((gas.sigma3(&s) - sigma).abs());
        d_entropy = d_entropy.max((gas.entropy(&s)? - setup.s_plus()).abs());
        d_lambda = d_lambda.max((gas.lambda3(&s) - xi).abs());
        let q = oracle::fan_state_newton(gas, &right, xi)?;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        d_newton = d_newton.max(
            rel(q.rho, s.rho)
                .max(rel(q.u, s.u))
                .max(rel(q.theta, s.theta)),
        );
    }

    let mut r = rng(p.seed, 1);
    let mut d_quad = 0.0f64;
    for _ in 0..p.random_states {
        let g = GasModel::new(r.gen_range(1.2..3.0), r.gen_range(0.1..2.0))?;
        let s = PrimitiveState::new(
            r.gen_range(0.01..10.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(0.01..10.0),
        );
        d_quad = d_quad.max((oracle::sigma3_quadrature(&g, &s)? - g.sigma3(&s)).abs());
    }
    Ok(vec![
        Check::at_most(1, "fan: sigma3 constant", d_sigma, 1e-11),
        Check::at_most(1, "fan: entropy constant", d_entropy, 1e-11),
        Check::at_most(1, "fan: lambda3 == xi", d_lambda, 1e-11),
        Check::at_most(1, "fan: closed form vs Newton (rel)", d_newton, 1e-11),
        Check::at_most(1, "sigma3: closed form vs quadrature", d_quad, 1e-10),
    ])
}

const DELTAS: [f64; 3] = [1e-1, 1e-2, 1e-3];
const TIMES: [f64; 3] = [0.1, 1.0, 10.0];

/// Characteristic solve, the curvature bound and decay to the sharp wave.
pub fn burgers_suite(p: &SuiteParams) -> Result<Vec<Check>> {
    let (w_minus, w_plus) = (-0.8, 1.3);
    let mut r = rng(p.seed, 2);
    let per = p.burgers_queries.div_ceil(DELTAS.len());
    let mut residual = 0.0f64;
    for &delta in &DELTAS {
        let b = BurgersProfile::new(w_minus, w_plus, delta)?;
        for _ in 0..per {
            let x = r.gen_range(-20.0..20.0);
            let t = r.gen_range(0.0..10.0);
            let (w, x0) = b.w_eval(x, t)?;
            residual = residual.max((x0 + w * t - x).abs() / (1.0 + x.abs()));
        }
    }

    let mut der22 = 0.0f64;
    let mut ratios = Vec::new();
    let mut lp_wx = Vec::new();
    let mut lp_wxx = Vec::new();
    for &delta in &DELTAS {
        let b = BurgersProfile::new(w_minus, w_plus, delta)?;
        for &t in &TIMES {
            let report = b.lp_report(t, &[1.0, 2.0, f64::INFINITY])?;
            der22 = der22.max(report.der22_max_ratio);
            lp_wx.push(report.max_ratio_w_x());
            lp_wxx.push(report.max_ratio_w_xx());
            // Random points as well as the report's grid.
            for _ in 0..2000 {
                let x = r.gen_range(w_minus * t - 20.0 * delta..w_plus * t + 20.0 * delta);
                let q = b.eval(x, t, None)?;
                if q.w_x > 0.0 {
                    der22 = der22.max(q.w_xx.abs() / (4.0 / delta * q.w_x));
                }
            }
            let scale = delta / t * ((1.0 + t).ln() + delta.ln().abs());
            ratios.push(b.sharp_distance(t)? / scale);
        }
    }
    let spread = |v: &[f64]| {
        let max = v.iter().copied().fold(0.0, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    };
    Ok(vec![
        Check::at_most(2, "burgers: foot residual / (1+|x|)", residual, 1e-12),
        Check::at_most(2, "burgers: max |w_xx| / ((4/delta) w_x)", der22, 1.0),
        Check::info(
            2,
            "burgers: max sharp-distance ratio",
            ratios.iter().copied().fold(0.0, f64::max),
        ),
        Check::at_most(
            2,
            "burgers: sharp-distance ratio spread",
            spread(&ratios),
            10.0,
        ),
        Check::at_most(2, "burgers: L^p ratio spread, w_x", spread(&lp_wx), 10.0),
        Check::at_most(2, "burgers: L^p ratio spread, w_xx", spread(&lp_wxx), 10.0),
    ])
}

/// Something that evaluates the approximate profile with derivatives.
pub trait ProfileEvaluator {
    fn eval(&self, x: f64, t: f64) -> Result<ProfileState>;
    fn delta(&self) -> f64;
}

impl ProfileEvaluator for ApproxProfile {
    fn eval(&self, x: f64, t: f64) -> Result<ProfileState> {
        ApproxProfile::eval(self, x, t)
    }
    fn delta(&self) -> f64 {
        ApproxProfile::delta(self)
    }
}

/// Largest relative error between the derivative fields of `eval` and
/// central differences of its value fields at the given points. Values
/// below 1% of the largest magnitude of a field are compared against that
/// floor instead, so exponentially small tails do not dominate.
pub fn derivative_agreement(eval: &dyn ProfileEvaluator, points: &[(f64, f64)]) -> Result<f64> {
    let h = 1e-5 * eval.delta().max(1.0);
    let mut rows = Vec::with_capacity(points.len());
    for &(x, t) in points {
        let (a, q, c) = (eval.eval(x + h, t)?, eval.eval(x, t)?, eval.eval(x - h, t)?);
        let fd = |pa: f64, pc: f64| (pa - pc) / (2.0 * h);
        rows.push([
            (q.rho_x, fd(a.rho, c.rho)),
            (q.u_x, fd(a.u, c.u)),
            (q.theta_x, fd(a.theta, c.theta)),
            (q.rho_xx, fd(a.rho_x, c.rho_x)),
            (q.u_xx, fd(a.u_x, c.u_x)),
            (q.theta_xx, fd(a.theta_x, c.theta_x)),
        ]);
    }
    let mut worst = 0.0f64;
    for k in 0..6 {
        let scale = rows.iter().map(|r| r[k].0.abs()).fold(0.0, f64::max);
        for r in &rows {
            let (an, fd) = r[k];
            let denom = an.abs().max(1e-2 * scale);
            if denom > 0.0 {
                worst = worst.max((an - fd).abs() / denom);
            }
        }
    }
    Ok(worst)
}

/// Residuals of the three Euler conservation laws for the profile, with
/// analytic space derivatives and central time differences of step `dt`.
pub fn euler_residual(profile: &ApproxProfile, x: f64, t: f64, dt: f64) -> Result<[f64; 3]> {
    let gas = profile.setup().gas();
    let g1 = gas.gamma() - 1.0;
    let cons = |t: f64| -> Result<[f64; 3]> {
        let s = profile.eval(x, t)?.state();
        Ok([s.rho, s.rho * s.u, s.total_energy()])
    };
    let (a, b) = (cons(t + dt)?, cons(t - dt)?);
    let q = profile.eval(x, t)?;
    let (r, u, th) = (q.rho, q.u, q.theta);
    let p = g1 * r * th;
    let p_x = g1 * (q.rho_x * th + r * q.theta_x);
    let e = r * (th + 0.5 * u * u);
    let e_x = q.rho_x * (th + 0.5 * u * u) + r * (q.theta_x + u * q.u_x);
    let flux_x = [
        q.rho_x * u + r * q.u_x,
        q.rho_x * u * u + 2.0 * r * u * q.u_x + p_x,
        q.u_x * (e + p) + u * (e_x + p_x),
    ];
    Ok([0, 1, 2].map(|c| (a[c] - b[c]) / (2.0 * dt) + flux_x[c]))
}

pub fn profile_suite(p: &SuiteParams, nu: f64, delta: f64) -> Result<Vec<Check>> {
    let cut = p.setup.make_cutoff(nu)?;
    let profile = ApproxProfile::new(p.setup, cut, delta)?;
    let mut r = rng(p.seed, 3);
    let (lo, hi) = (p.setup.lambda3_cut(&cut), p.setup.lambda3_right());
    let points: Vec<(f64, f64)> = (0..200)
        .map(|_| {
            let t = r.gen_range(0.0..2.0);
            (r.gen_range(lo * t - 5.0 * delta..hi * t + 5.0 * delta), t)
        })
        .collect();
    let fd = derivative_agreement(&profile, &points)?;

    let samples: Vec<(f64, f64)> = (0..50)
        .map(|_| {
            let t = r.gen_range(0.2..2.0);
            (r.gen_range(lo * t - 3.0 * delta..hi * t + 3.0 * delta), t)
        })
        .collect();
    let steps = [4e-2, 2e-2, 1e-2, 5e-3];
    let mut res = Vec::new();
    for &dt in &steps {
        let mut m = 0.0f64;
        for &(x, t) in &samples {
            for v in euler_residual(&profile, x, t, dt)? {
                m = m.max(v.abs());
            }
        }
        res.push(m);
    }
    let order = res
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .fold(f64::INFINITY, f64::min);
    Ok(vec![
        Check::at_most(3, "profile: derivatives vs differences (rel)", fd, 1e-6),
        Check::info(
            3,
            "profile: Euler residual at dt = 5e-3",
            res[res.len() - 1],
        ),
        Check::at_least(3, "profile: Euler residual order in dt", order, 1.8),
    ])
}

pub const CUTOFF_NU: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Log-log slopes of the cut-off errors `(rho, m, n)` against `nu`.
pub fn cutoff_slopes(setup: &WaveSetup) -> Result<[f64; 3]> {
    let mut errs = [Vec::new(), Vec::new(), Vec::new()];
    for &nu in &CUTOFF_NU {
        let (a, b, c) = setup.cutoff_sup_error(nu)?;
        errs[0].push(a);
        errs[1].push(b);
        errs[2].push(c);
    }
    let slope = |e: &[f64]| fit_rate(&CUTOFF_NU, e, false).map(|f| f.b);
    Ok([slope(&errs[0])?, slope(&errs[1])?, slope(&errs[2])?])
}

/// The same gas and right density and temperature, moved to the frame
/// where the vacuum edge is at rest.
pub fn rest_frame(setup: &WaveSetup) -> Result<WaveSetup> {
    let r = setup.right();
    WaveSetup::new(
        *setup.gas(),
        PrimitiveState::new(r.rho, r.u - setup.u_minus(), r.theta),
    )
}

/// Cut-off convergence in `nu`. The momentum error contains a term
/// `nu |u_minus|` that is linear but a term `~ nu^{(gamma+1)/2}` of the
/// opposite sign competes with it at moderate `nu`, so the slope is judged
/// in the frame where `u_minus = 0`; the slope in the configured frame is
/// reported alongside.
pub fn cutoff_suite(p: &SuiteParams) -> Result<Vec<Check>> {
    let rest = cutoff_slopes(&rest_frame(&p.setup)?)?;
    let given = cutoff_slopes(&p.setup)?;
    let mut out = Vec::new();
    for (k, field) in ["rho", "m", "n"].iter().enumerate() {
        out.push(Check::at_least(
            4,
            format!("cutoff: slope {field} (u_minus = 0)"),
            rest[k],
            0.95,
        ));
    }
    for (k, field) in ["rho", "m", "n"].iter().enumerate() {
        out.push(Check::info(
            4,
            format!("cutoff: slope {field} (configured frame)"),
            given[k],
        ));
    }
    Ok(out)
}

pub fn rate_suite() -> Result<Vec<Check>> {
    let rate = |g: f64, a: f64| GasModel::new(g, a).map(|gas| theoretical_rate(&gas));
    let mut monotone = true;
    for gi in 0..30 {
        let g = 1.05 + 0.07 * gi as f64;
        for ai in 0..30 {
            let a = 0.05 + 0.1 * ai as f64;
            monotone &= rate(g, a + 0.1)? < rate(g, a)? && rate(g + 0.07, a)? < rate(g, a)?;
        }
    }
    Ok(vec![
        Check::at_most(
            7,
            "rate: |a(2, 1) - 1/48|",
            (rate(2.0, 1.0)? - 1.0 / 48.0).abs(),
            1e-15,
        ),
        Check::at_most(
            7,
            "rate: |a(1.4, 1) - 1/30|",
            (rate(1.4, 1.0)? - 1.0 / 30.0).abs(),
            1e-15,
        ),
        Check::at_most(
            7,
            "rate: |a(1.4, 0.5) - 1/27.6|",
            (rate(1.4, 0.5)? - 1.0 / 27.6).abs(),
            1e-15,
        ),
        Check::at_least(
            7,
            "rate: decreasing in alpha and gamma (grid)",
            f64::from(u8::from(monotone)),
            1.0,
        ),
    ])
}

/// Relative entropy positivity, the Hessian of `f^{3/4}` and the sampled
/// lower bound of the dissipation density.
pub fn entropy_suite(p: &SuiteParams) -> Result<Vec<Check>> {
    let mut r = rng(p.seed, 4);
    let mut eta_min_ratio = f64::INFINITY;
    let mut eta_self = 0.0f64;
    let mut h_ratio = f64::INFINITY;
    for _ in 0..p.random_states.max(1) * 10 {
        let gas = GasModel::new(r.gen_range(1.1..3.0), 1.0)?;
        let reference = PrimitiveState::new(
            r.gen_range(0.05..5.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(0.05..5.0),
        );
        eta_self = eta_self.max(gas.relative_entropy(&reference, &reference)?.0.abs());

        // Anywhere: eta > 0 relative to a squared distance.
        let s = PrimitiveState::new(
            r.gen_range(0.05..5.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(0.05..5.0),
        );
        let (eta, _) = gas.relative_entropy(&s, &reference)?;
        let d2 = (s.rho - reference.rho).powi(2)
            + (s.u - reference.u).powi(2)
            + (s.theta - reference.theta).powi(2);
        if d2 > 0.0 {
            eta_min_ratio = eta_min_ratio.min(eta / d2);
        }

        // Within 10% of the reference.
        let near = PrimitiveState::new(
            reference.rho * (1.0 + r.gen_range(-0.1..0.1)),
            reference.u + reference.theta.sqrt() * r.gen_range(-0.1..0.1),
            reference.theta * (1.0 + r.gen_range(-0.1..0.1)),
        );
        let (phi, psi, zeta) = (
            near.rho - reference.rho,
            near.u - reference.u,
            near.theta - reference.theta,
        );
        let quad = reference.rho * psi * psi
            + reference.theta / reference.rho * phi * phi
            + reference.rho / reference.theta * zeta * zeta;
        if quad > 0.0 {
            h_ratio = h_ratio.min(gas.entropy_dissipation(&near, &reference)? / quad);
        }
    }

    let gas = GasModel::new(2.0, 1.0)?;
    let closed = gas.hessian_det_f_beta(0.75)?;
    let h = 1e-4;
    let f = |x1: f64, x2: f64| gas.f_beta(0.75, x1, x2);
    let f11 = (f(1.0 + h, 1.0)? - 2.0 * f(1.0, 1.0)? + f(1.0 - h, 1.0)?) / (h * h);
    let f22 = (f(1.0, 1.0 + h)? - 2.0 * f(1.0, 1.0)? + f(1.0, 1.0 - h)?) / (h * h);
    let f12 = (f(1.0 + h, 1.0 + h)? - f(1.0 + h, 1.0 - h)? - f(1.0 - h, 1.0 + h)?
        + f(1.0 - h, 1.0 - h)?)
        / (4.0 * h * h);
    let numeric = f11 * f22 - f12 * f12;
    Ok(vec![
        Check::at_most(8, "entropy: eta(s, s)", eta_self, 1e-14),
        Check::above(8, "entropy: min eta / |s - ref|^2", eta_min_ratio, 0.0),
        Check::at_most(
            8,
            "entropy: |det Hess f^{3/4} - (gamma-1)/3|",
            (closed - 1.0 / 3.0).abs(),
            1e-15,
        ),
        Check::at_most(
            8,
            "entropy: Hessian det by differences",
            (numeric - 1.0 / 3.0).abs(),
            1e-6,
        ),
        Check::above(8, "entropy: sampled H lower-bound ratio", h_ratio, 0.0),
    ])
}

/// All suites except the solver's, in criterion order.
pub fn property_suites(p: &SuiteParams, nu: f64, delta: f64) -> Result<Vec<Check>> {
    let mut out = riemann_suite(p)?;
    out.extend(burgers_suite(p)?);
    out.extend(profile_suite(p, nu, delta)?);
    out.extend(cutoff_suite(p)?);
    out.extend(rate_suite()?);
    out.extend(entropy_suite(p)?);
    Ok(out)
}
