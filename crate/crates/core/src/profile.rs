//! Smooth approximate rarefaction `(rho_bar, u_bar, theta_bar)(x, t)`.
//!
//! The profile is defined by `lambda3 = w`, `sigma3 = sigma3(right)` and
//! `S = S_plus`, where `w` is the smoothed Burgers wave between
//! `w- = lambda3(cut state)` and `w+ = lambda3(right)`. It solves the Euler
//! equations exactly and converges to the cut-off wave as `t -> infinity`.

use crate::burgers::{BurgersPoint, BurgersProfile};
use crate::gas::PrimitiveState;
use crate::math;
use crate::wave::{CutoffState, WaveSetup};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxProfile {
    setup: WaveSetup,
    cutoff: CutoffState,
    burgers: BurgersProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfileState {
    pub rho: f64,
    pub u: f64,
    pub theta: f64,
    pub rho_x: f64,
    pub u_x: f64,
    pub theta_x: f64,
    pub rho_xx: f64,
    pub u_xx: f64,
    pub theta_xx: f64,
}

impl ProfileState {
    pub fn state(&self) -> PrimitiveState {
        PrimitiveState::new(self.rho, self.u, self.theta)
    }
}

impl ApproxProfile {
    pub fn new(setup: WaveSetup, cutoff: CutoffState, delta: f64) -> Result<Self> {
        let burgers =
            BurgersProfile::new(setup.lambda3_cut(&cutoff), setup.lambda3_right(), delta)?;
        Ok(Self {
            setup,
            cutoff,
            burgers,
        })
    }

    pub fn setup(&self) -> &WaveSetup {
        &self.setup
    }

    pub fn cutoff(&self) -> &CutoffState {
        &self.cutoff
    }

    pub fn burgers(&self) -> &BurgersProfile {
        &self.burgers
    }

    pub fn delta(&self) -> f64 {
        self.burgers.delta()
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<ProfileState> {
        let p = self.burgers.eval(x, t, None)?;
        Ok(self.from_burgers(&p))
    }

    /// Same as [`ApproxProfile::eval`] with a warm start for the characteristic foot.
    pub fn eval_warm(&self, x: f64, t: f64, guess: Option<f64>) -> Result<(ProfileState, f64)> {
        let p = self.burgers.eval(x, t, guess)?;
        Ok((self.from_burgers(&p), p.x0))
    }

    /// Inverts `lambda3 = w` on the 3-wave curve and applies the chain rule.
    pub fn from_burgers(&self, p: &BurgersPoint) -> ProfileState {
        let gas = self.setup.gas();
        let g = gas.gamma();
        let s = self.setup.s_plus();
        let c = (g - 1.0) * (p.w - self.setup.u_minus()) / (g + 1.0);
        let base = self.setup.state_from_sound_speed(p.w - c, c);
        let (rho, theta) = (base.rho, base.theta);

        let u_x = 2.0 / (g + 1.0) * p.w_x;
        let u_xx = 2.0 / (g + 1.0) * p.w_xx;
        let es = math::exp(s);
        let k = 1.0 / math::sqrt(g * (g - 1.0) * es);
        let rho_pow = math::powf(rho, 0.5 * (3.0 - g));
        let rho_x = k * rho_pow * u_x;
        let rho_xx = k * rho_pow * u_xx
            + (3.0 - g) / (2.0 * g * (g - 1.0) * es) * math::powf(rho, 2.0 - g) * u_x * u_x;
        let r = math::sqrt((g - 1.0) / g);
        let sqrt_theta = math::sqrt(theta);
        let theta_x = r * sqrt_theta * u_x;
        let theta_xx = r * sqrt_theta * u_xx + (g - 1.0) / (2.0 * g) * u_x * u_x;
        ProfileState {
            rho,
            u: base.u,
            theta,
            rho_x,
            u_x,
            theta_x,
            rho_xx,
            u_xx,
            theta_xx,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::GasModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn profile(gamma: f64, nu: f64, delta: f64) -> ApproxProfile {
        let gas = GasModel::new(gamma, 0.5).unwrap();
        let setup = WaveSetup::new(gas, PrimitiveState::new(1.0, 0.2, 1.3)).unwrap();
        let cut = setup.make_cutoff(nu).unwrap();
        ApproxProfile::new(setup, cut, delta).unwrap()
    }

    #[test]
    fn endpoints() {
        let p = profile(1.4, 0.1, 0.05);
        let right = p.eval(50.0, 0.0).unwrap();
        let r = p.setup().right();
        assert!((right.rho - r.rho).abs() < 1e-12);
        assert!((right.u - r.u).abs() < 1e-12);
        assert!((right.theta - r.theta).abs() < 1e-12);
        let left = p.eval(-50.0, 0.0).unwrap();
        let c = p.cutoff();
        assert!((left.rho - c.nu).abs() < 1e-12);
        assert!((left.u - c.u_nu).abs() < 1e-12);
        assert!((left.theta - c.theta_nu).abs() < 1e-12);
    }

    #[test]
    fn invariants_hold_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for gamma in [1.2, 1.4, 5.0 / 3.0, 2.0, 3.0] {
            let p = profile(gamma, 0.05, 0.1);
            let gas = *p.setup().gas();
            let sig = gas.sigma3(&p.setup().right());
            for _ in 0..500 {
                let x = rng.gen_range(-4.0..4.0);
                let t = rng.gen_range(0.0..3.0);
                let q = p.eval(x, t).unwrap();
                let (w, _) = p.burgers().w_eval(x, t).unwrap();
                assert!((gas.lambda3(&q.state()) - w).abs() < 1e-12);
                assert!((gas.sigma3(&q.state()) - sig).abs() < 1e-12);
                assert!((gas.entropy(&q.state()).unwrap() - p.setup().s_plus()).abs() < 1e-12);
                assert!(q.u_x > 0.0);
                assert!(q.rho >= p.cutoff().nu * (1.0 - 1e-12) && q.rho <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = profile(1.4, 0.1, 0.2);
        for _ in 0..200 {
            let x = rng.gen_range(-2.0..2.0);
            let t = rng.gen_range(0.0..2.0);
            let h = 1e-5 * p.delta().max(1.0);
            let f = |x: f64| p.eval(x, t).unwrap();
            let (a, b, c) = (f(x + h), f(x), f(x - h));
            let q = b;
            let d1 = |pa: f64, pc: f64| (pa - pc) / (2.0 * h);
            for (an, fd) in [
                (q.rho_x, d1(a.rho, c.rho)),
                (q.u_x, d1(a.u, c.u)),
                (q.theta_x, d1(a.theta, c.theta)),
                (q.rho_xx, d1(a.rho_x, c.rho_x)),
                (q.u_xx, d1(a.u_x, c.u_x)),
                (q.theta_xx, d1(a.theta_x, c.theta_x)),
            ] {
                assert!((an - fd).abs() <= 1e-6 * an.abs().max(1e-4), "{an} vs {fd}");
            }
        }
    }
}
