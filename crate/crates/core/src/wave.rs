//! Self-similar 3-rarefaction wave connecting vacuum on the left to a
//! constant state on the right, and its cut-off at a small density `nu`.
//!
//! Inside the fan the state is obtained in closed form from
//! `lambda3 = xi`, `sigma3 = u_minus` and `S = S_plus`:
//! `c = (gamma-1)(xi - u_minus)/(gamma+1)`, `u = xi - c`.

use alloc::vec::Vec;

use crate::gas::{GasModel, PrimitiveState};
use crate::math;
use crate::{Error, Result};

/// Right state of the vacuum Riemann problem with its derived invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSetup {
    gas: GasModel,
    right: PrimitiveState,
    u_minus: f64,
    s_plus: f64,
}

/// The point `(nu, u_nu, theta_nu)` on the 3-wave curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffState {
    pub nu: f64,
    pub u_nu: f64,
    pub theta_nu: f64,
}

impl CutoffState {
    pub fn state(&self) -> PrimitiveState {
        PrimitiveState::new(self.nu, self.u_nu, self.theta_nu)
    }
}

/// Wave state at one `xi = x/t` with the vacuum-safe `m = rho u`, `n = rho theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub rho: f64,
    pub u: f64,
    pub theta: f64,
    pub m: f64,
    pub n: f64,
}

impl WaveSample {
    fn from_state(s: PrimitiveState) -> Self {
        Self {
            rho: s.rho,
            u: s.u,
            theta: s.theta,
            m: s.momentum(),
            n: s.rho_theta(),
        }
    }

    pub fn state(&self) -> PrimitiveState {
        PrimitiveState::new(self.rho, self.u, self.theta)
    }
}

impl WaveSetup {
    pub fn new(gas: GasModel, right: PrimitiveState) -> Result<Self> {
        if !(right.rho > 0.0) || !right.rho.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho_plus",
                value: right.rho,
                expected: "rho_plus > 0",
            });
        }
        if !(right.theta > 0.0) || !right.theta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "theta_plus",
                value: right.theta,
                expected: "theta_plus > 0",
            });
        }
        if !right.u.is_finite() {
            return Err(Error::InvalidParameter {
                name: "u_plus",
                value: right.u,
                expected: "finite velocity",
            });
        }
        Ok(Self {
            gas,
            right,
            u_minus: gas.sigma3(&right),
            s_plus: gas.entropy(&right)?,
        })
    }

    pub fn gas(&self) -> &GasModel {
        &self.gas
    }

    pub fn right(&self) -> PrimitiveState {
        self.right
    }

    /// Speed of the gas at the vacuum edge, `sigma3` of the right state.
    pub fn u_minus(&self) -> f64 {
        self.u_minus
    }

    pub fn s_plus(&self) -> f64 {
        self.s_plus
    }

    /// `lambda3` of the right state: right edge of the fan.
    pub fn lambda3_right(&self) -> f64 {
        self.gas.lambda3(&self.right)
    }

    /// Fan state at speed `xi`; only meaningful for `u_minus <= xi <= lambda3_right`.
    pub fn fan_state(&self, xi: f64) -> PrimitiveState {
        let g = self.gas.gamma();
        let c = ((g - 1.0) * (xi - self.u_minus) / (g + 1.0)).max(0.0);
        self.state_from_sound_speed(xi - c, c)
    }

    /// State on the isentrope with the given velocity and sound speed.
    pub(crate) fn state_from_sound_speed(&self, u: f64, c: f64) -> PrimitiveState {
        let theta = self.gas.theta_from_sound_speed(c);
        let rho = if theta > 0.0 {
            self.gas.rho_on_isentrope(theta, self.s_plus)
        } else {
            0.0
        };
        PrimitiveState::new(rho, u, theta)
    }

    /// The exact wave with vacuum at `xi`. In the vacuum region the state is
    /// reported as `(0, u_minus, 0)` with `m = n = 0`.
    pub fn eval_vacuum_wave(&self, xi: f64) -> WaveSample {
        if xi < self.u_minus {
            WaveSample::from_state(PrimitiveState::vacuum(self.u_minus))
        } else if xi <= self.lambda3_right() {
            WaveSample::from_state(self.fan_state(xi))
        } else {
            WaveSample::from_state(self.right)
        }
    }

    /// Cuts the wave at density `nu`, `0 < nu <= rho_plus`.
    pub fn make_cutoff(&self, nu: f64) -> Result<CutoffState> {
        if !(nu > 0.0 && nu <= self.right.rho) {
            return Err(Error::InvalidParameter {
                name: "nu",
                value: nu,
                expected: "0 < nu <= rho_plus",
            });
        }
        let g = self.gas.gamma();
        let theta_nu = self.gas.theta_on_isentrope(nu, self.s_plus);
        let u_nu = self.u_minus + 2.0 * math::sqrt(g / (g - 1.0) * theta_nu);
        Ok(CutoffState { nu, u_nu, theta_nu })
    }

    /// `lambda3` of the cut state: left edge of the cut-off fan.
    pub fn lambda3_cut(&self, cutoff: &CutoffState) -> f64 {
        self.gas.lambda3(&cutoff.state())
    }

    pub fn eval_cutoff_wave(&self, cutoff: &CutoffState, xi: f64) -> WaveSample {
        if xi < self.lambda3_cut(cutoff) {
            WaveSample::from_state(cutoff.state())
        } else if xi <= self.lambda3_right() {
            WaveSample::from_state(self.fan_state(xi))
        } else {
            WaveSample::from_state(self.right)
        }
    }

    /// Sample points for sup-norm comparisons of the two waves: a uniform grid
    /// over `[u_minus - 1, lambda3_right + 1]` plus the branch points.
    pub fn comparison_grid(&self, cutoff: &CutoffState, samples: usize) -> Vec<f64> {
        let lo = self.u_minus - 1.0;
        let hi = self.lambda3_right() + 1.0;
        let n = samples.max(2);
        let mut xs: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let cut = self.lambda3_cut(cutoff);
        xs.extend_from_slice(&[self.u_minus, cut, self.lambda3_right()]);
        xs
    }

    /// Sup-norm distances in `(rho, m, n)` between the cut-off and vacuum waves.
    pub fn cutoff_sup_error(&self, nu: f64) -> Result<(f64, f64, f64)> {
        let cutoff = self.make_cutoff(nu)?;
        let mut err = (0.0f64, 0.0f64, 0.0f64);
        for xi in self.comparison_grid(&cutoff, CUTOFF_SAMPLES) {
            let a = self.eval_cutoff_wave(&cutoff, xi);
            let b = self.eval_vacuum_wave(xi);
            err.0 = err.0.max((a.rho - b.rho).abs());
            err.1 = err.1.max((a.m - b.m).abs());
            err.2 = err.2.max((a.n - b.n).abs());
        }
        Ok(err)
    }
}

/// Uniform samples used by [`WaveSetup::cutoff_sup_error`].
pub const CUTOFF_SAMPLES: usize = 100_000;

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    fn setup(gamma: f64, right: PrimitiveState) -> WaveSetup {
        WaveSetup::new(GasModel::new(gamma, 1.0).unwrap(), right).unwrap()
    }

    #[test]
    fn setup_examples() {
        let s = setup(2.0, PrimitiveState::new(1.0, 0.0, 1.0));
        assert!((s.u_minus() + 2.0 * SQRT_2).abs() < 1e-15);
        assert_eq!(s.s_plus(), 0.0);
        let s = setup(2.0, PrimitiveState::new(1.0, 2.0 * SQRT_2, 1.0));
        assert!(s.u_minus().abs() < 1e-15);
        let s = setup(1.4, PrimitiveState::new(1.0, 0.0, 1.0));
        assert!((s.u_minus() + 5.0 * math::sqrt(0.56)).abs() < 1e-14);
        assert!(s.u_minus() < s.lambda3_right());
    }

    #[test]
    fn setup_rejects_nonpositive_right_state() {
        let gas = GasModel::new(1.4, 1.0).unwrap();
        assert!(WaveSetup::new(gas, PrimitiveState::new(0.0, 0.0, 1.0)).is_err());
        assert!(WaveSetup::new(gas, PrimitiveState::new(1.0, 0.0, -1.0)).is_err());
    }

    #[test]
    fn vacuum_wave_fan_example() {
        let s = setup(2.0, PrimitiveState::new(1.0, 0.0, 1.0));
        let w = s.eval_vacuum_wave(0.0);
        assert!((w.rho - 4.0 / 9.0).abs() < 1e-14);
        assert!((w.u + 2.0 * SQRT_2 / 3.0).abs() < 1e-14);
        assert!((w.theta - 4.0 / 9.0).abs() < 1e-14);
        assert!((w.m + 8.0 * SQRT_2 / 27.0).abs() < 1e-14);
        assert!((w.n - 16.0 / 81.0).abs() < 1e-14);
    }

    #[test]
    fn vacuum_wave_outer_branches() {
        let s = setup(1.4, PrimitiveState::new(1.0, 0.3, 2.0));
        let right = s.eval_vacuum_wave(s.lambda3_right() + 1.0);
        assert_eq!(right.state(), s.right());
        let vac = s.eval_vacuum_wave(s.u_minus() - 1.0);
        assert_eq!(
            (vac.rho, vac.u, vac.theta, vac.m, vac.n),
            (0.0, s.u_minus(), 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn cutoff_examples() {
        let s = setup(2.0, PrimitiveState::new(1.0, 0.0, 1.0));
        let c = s.make_cutoff(1.0).unwrap();
        assert!(c.u_nu.abs() < 1e-15 && (c.theta_nu - 1.0).abs() < 1e-15);
        let c = s.make_cutoff(0.25).unwrap();
        assert!((c.u_nu + SQRT_2).abs() < 1e-14);
        let gas = s.gas();
        assert!((gas.sigma3(&c.state()) - gas.sigma3(&s.right())).abs() < 1e-12);
        let tiny = s.make_cutoff(1e-12).unwrap();
        assert!((tiny.u_nu - s.u_minus()).abs() < 1e-5);
        assert!(s.make_cutoff(0.0).is_err());
        assert!(s.make_cutoff(1.5).is_err());
    }

    #[test]
    fn cutoff_wave_branches() {
        let s = setup(1.4, PrimitiveState::new(1.0, 0.0, 1.0));
        let c = s.make_cutoff(0.1).unwrap();
        let left = s.eval_cutoff_wave(&c, s.u_minus() - 10.0);
        assert_eq!(left.state(), c.state());
        let xi = 0.5 * (s.lambda3_cut(&c) + s.lambda3_right());
        assert_eq!(s.eval_cutoff_wave(&c, xi), s.eval_vacuum_wave(xi));
    }

    #[test]
    fn cutoff_density_error_is_nu() {
        let s = setup(1.4, PrimitiveState::new(1.0, 0.0, 1.0));
        for nu in [0.3, 0.1, 1e-2, 1e-3] {
            let (er, _, _) = s.cutoff_sup_error(nu).unwrap();
            assert!((er - nu).abs() <= 1e-15 * nu.max(1.0), "{er} vs {nu}");
        }
    }

    #[test]
    fn cutoff_errors_shrink_with_nu() {
        let s = setup(1.4, PrimitiveState::new(1.0, 0.0, 1.0));
        let mut prev = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for nu in [1e-1, 1e-2, 1e-3, 1e-4] {
            let e = s.cutoff_sup_error(nu).unwrap();
            assert!(e.0 < prev.0 && e.1 < prev.1 && e.2 < prev.2);
            assert!(e.0 / nu < 2.0 && e.1 / nu < 10.0 && e.2 / nu < 10.0);
            prev = e;
        }
    }
}
