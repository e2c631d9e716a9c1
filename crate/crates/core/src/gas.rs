//! Ideal polytropic gas with the normalization `A = R = gamma - 1`.
//!
//! With this choice `p = (gamma-1) rho theta = (gamma-1) rho^gamma e^S`,
//! the internal energy is `e = theta` and the entropy is
//! `S = ln theta - (gamma-1) ln rho`. Viscosity and heat conductivity are
//! `mu(theta) = kappa(theta) = theta^alpha`.

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    gamma: f64,
    alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub theta: f64,
}

impl PrimitiveState {
    pub const fn new(rho: f64, u: f64, theta: f64) -> Self {
        Self { rho, u, theta }
    }

    /// Vacuum with a nominal velocity attached.
    pub const fn vacuum(u: f64) -> Self {
        Self {
            rho: 0.0,
            u,
            theta: 0.0,
        }
    }

    pub fn is_vacuum(&self) -> bool {
        self.rho == 0.0
    }

    /// Momentum `rho u`, zero at vacuum.
    pub fn momentum(&self) -> f64 {
        if self.rho == 0.0 {
            0.0
        } else {
            self.rho * self.u
        }
    }

    /// `n = rho theta`, zero at vacuum.
    pub fn rho_theta(&self) -> f64 {
        if self.rho == 0.0 {
            0.0
        } else {
            self.rho * self.theta
        }
    }

    /// Total energy density `rho (theta + u^2/2)`.
    pub fn total_energy(&self) -> f64 {
        self.rho * (self.theta + 0.5 * self.u * self.u)
    }

    fn require_positive(&self, what: &'static str) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::Domain {
                what,
                value: self.rho,
            });
        }
        if !(self.theta > 0.0) {
            return Err(Error::Domain {
                what,
                value: self.theta,
            });
        }
        Ok(())
    }
}

impl GasModel {
    pub fn new(gamma: f64, alpha: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                expected: "gamma > 1",
            });
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                expected: "alpha > 0",
            });
        }
        Ok(Self { gamma, alpha })
    }

    /// Same as [`GasModel::new`] but admits `alpha = 0` (constant
    /// transport coefficients), which verification problems use.
    pub fn with_constant_transport(gamma: f64) -> Result<Self> {
        let mut g = Self::new(gamma, 1.0)?;
        g.alpha = 0.0;
        Ok(g)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn pressure(&self, s: &PrimitiveState) -> f64 {
        (self.gamma - 1.0) * s.rho * s.theta
    }

    /// `S = ln theta - (gamma-1) ln rho`; undefined at vacuum.
    pub fn entropy(&self, s: &PrimitiveState) -> Result<f64> {
        s.require_positive("entropy")?;
        Ok(math::ln(s.theta) - (self.gamma - 1.0) * math::ln(s.rho))
    }

    /// Temperature on the isentrope `S`: `theta = rho^(gamma-1) e^S`.
    pub fn theta_on_isentrope(&self, rho: f64, entropy: f64) -> f64 {
        math::powf(rho, self.gamma - 1.0) * math::exp(entropy)
    }

    /// Density on the isentrope `S` at temperature `theta`.
    pub fn rho_on_isentrope(&self, theta: f64, entropy: f64) -> f64 {
        math::powf(theta * math::exp(-entropy), 1.0 / (self.gamma - 1.0))
    }

    /// `c = sqrt(p_rho(rho, S)) = sqrt(gamma (gamma-1) theta)`.
    pub fn sound_speed(&self, s: &PrimitiveState) -> f64 {
        self.sound_speed_theta(s.theta)
    }

    #[inline]
    pub fn sound_speed_theta(&self, theta: f64) -> f64 {
        math::sqrt(self.gamma * (self.gamma - 1.0) * theta.max(0.0))
    }

    /// Temperature at which the sound speed equals `c`.
    pub fn theta_from_sound_speed(&self, c: f64) -> f64 {
        c * c / (self.gamma * (self.gamma - 1.0))
    }

    pub fn lambda1(&self, s: &PrimitiveState) -> f64 {
        s.u - self.sound_speed(s)
    }

    pub fn lambda3(&self, s: &PrimitiveState) -> f64 {
        s.u + self.sound_speed(s)
    }

    /// First 3-Riemann invariant `u - 2c/(gamma-1)`, normalized so that the
    /// density integral vanishes at vacuum.
    pub fn sigma3(&self, s: &PrimitiveState) -> f64 {
        s.u - 2.0 * self.sound_speed(s) / (self.gamma - 1.0)
    }

    /// `mu(theta) = theta^alpha`.
    #[inline]
    pub fn mu(&self, theta: f64) -> f64 {
        math::pow_fast(theta.max(0.0), self.alpha)
    }

    /// `kappa(theta) = theta^alpha`.
    #[inline]
    pub fn kappa(&self, theta: f64) -> f64 {
        self.mu(theta)
    }

    /// Relative entropy `eta` of `s` with respect to `reference` and its flux `q`.
    pub fn relative_entropy(
        &self,
        s: &PrimitiveState,
        reference: &PrimitiveState,
    ) -> Result<(f64, f64)> {
        s.require_positive("relative entropy")?;
        reference.require_positive("relative entropy")?;
        let g1 = self.gamma - 1.0;
        let psi = s.u - reference.u;
        let eta = g1 * s.rho * reference.theta * phi_convex(reference.rho / s.rho)?
            + 0.5 * s.rho * psi * psi
            + s.rho * reference.theta * phi_convex(s.theta / reference.theta)?;
        let q = s.u * eta + g1 * psi * (s.rho * s.theta - reference.rho * reference.theta);
        Ok((eta, q))
    }

    /// The quadratic-like dissipation density `H` that multiplies the
    /// profile gradient in the relative-entropy balance.
    pub fn entropy_dissipation(
        &self,
        s: &PrimitiveState,
        reference: &PrimitiveState,
    ) -> Result<f64> {
        s.require_positive("entropy dissipation")?;
        reference.require_positive("entropy dissipation")?;
        let g = self.gamma;
        let g1 = g - 1.0;
        let psi = s.u - reference.u;
        let log_mix = g1 * math::ln(reference.rho / s.rho) + math::ln(s.theta / reference.theta);
        Ok(s.rho * psi * psi
            + g1 * s.rho * reference.theta * phi_convex(s.theta / reference.theta)?
            + g1 * g1 * s.rho * reference.theta * phi_convex(reference.rho / s.rho)?
            + math::sqrt(g1 / g) * math::sqrt(reference.theta) * s.rho * psi * log_mix)
    }

    /// `f^beta(x1, x2)` with `x1 = theta/theta_bar`, `x2 = rho_bar/rho`.
    pub fn f_beta(&self, beta: f64, x1: f64, x2: f64) -> Result<f64> {
        check_beta(beta)?;
        let g1 = self.gamma - 1.0;
        let l = g1 * ln_pos(x2)? + ln_pos(x1)?;
        Ok(phi_convex(x1)? + g1 * phi_convex(x2)? - l * l / (4.0 * beta * self.gamma))
    }

    /// Closed-form Hessian of `f^beta` at `(1, 1)`.
    pub fn hessian_f_beta(&self, beta: f64) -> Result<[[f64; 2]; 2]> {
        check_beta(beta)?;
        let g = self.gamma;
        let k = 1.0 / (2.0 * beta * g);
        let off = -(g - 1.0) * k;
        Ok([[1.0 - k, off], [off, (g - 1.0) * (1.0 - (g - 1.0) * k)]])
    }

    /// `det Hess f^beta(1,1) = (gamma-1)(1 - 1/(2 beta))`.
    pub fn hessian_det_f_beta(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok((self.gamma - 1.0) * (1.0 - 1.0 / (2.0 * beta)))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            expected: "0 < beta < 1",
        })
    }
}

fn ln_pos(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(math::ln(x))
    } else {
        Err(Error::Domain {
            what: "logarithm",
            value: x,
        })
    }
}

/// `Phi(x) = x - ln x - 1`, nonnegative with its only zero at `x = 1`.
pub fn phi_convex(x: f64) -> Result<f64> {
    Ok(x - ln_pos(x)? - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{E, SQRT_2};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GasModel::new(1.0, 1.0).is_err());
        assert!(GasModel::new(1.4, 0.0).is_err());
        assert!(GasModel::new(f64::NAN, 1.0).is_err());
        assert!(GasModel::new(1.4, 0.5).is_ok());
    }

    #[test]
    fn pressure_values() {
        let g2 = GasModel::new(2.0, 1.0).unwrap();
        assert_eq!(g2.pressure(&PrimitiveState::new(1.0, 0.0, 1.0)), 1.0);
        let g = GasModel::new(1.4, 1.0).unwrap();
        assert!(close(
            g.pressure(&PrimitiveState::new(2.0, 5.0, 3.0)),
            2.4,
            1e-15
        ));
        assert_eq!(g.pressure(&PrimitiveState::vacuum(3.0)), 0.0);
    }

    #[test]
    fn entropy_values_and_vacuum() {
        let g2 = GasModel::new(2.0, 1.0).unwrap();
        assert_eq!(
            g2.entropy(&PrimitiveState::new(1.0, 0.0, 1.0)).unwrap(),
            0.0
        );
        let s = g2.entropy(&PrimitiveState::new(E, 0.0, E * E)).unwrap();
        assert!(close(s, 1.0, 1e-15));
        assert!(matches!(
            g2.entropy(&PrimitiveState::vacuum(0.0)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn sound_speed_and_lambda3() {
        let g2 = GasModel::new(2.0, 1.0).unwrap();
        let s = PrimitiveState::new(1.0, 0.0, 1.0);
        assert!(close(g2.sound_speed(&s), SQRT_2, 1e-15));
        assert!(close(g2.lambda3(&s), SQRT_2, 1e-15));
        assert_eq!(g2.sound_speed(&PrimitiveState::vacuum(0.0)), 0.0);
        assert_eq!(g2.lambda3(&PrimitiveState::vacuum(-2.5)), -2.5);
        let g53 = GasModel::new(5.0 / 3.0, 1.0).unwrap();
        let c = g53.sound_speed(&PrimitiveState::new(1.0, 0.0, 3.0));
        assert!(close(c, math::sqrt(10.0 / 3.0), 1e-15));
        let g = GasModel::new(1.4, 1.0).unwrap();
        let l3 = g.lambda3(&PrimitiveState::new(1.0, 1.0, 1.0));
        assert!(close(l3, 1.0 + math::sqrt(0.56), 1e-15));
    }

    #[test]
    fn sigma3_values() {
        let g2 = GasModel::new(2.0, 1.0).unwrap();
        let s = g2.sigma3(&PrimitiveState::new(1.0, 0.0, 1.0));
        assert!(close(s, -2.0 * SQRT_2, 1e-15));
        assert_eq!(g2.sigma3(&PrimitiveState::vacuum(0.7)), 0.7);
        let g = GasModel::new(1.4, 1.0).unwrap();
        let s = g.sigma3(&PrimitiveState::new(1.0, 0.0, 1.0));
        assert!(close(s, -5.0 * math::sqrt(0.56), 1e-14));
    }

    #[test]
    fn transport_coefficients() {
        for alpha in [0.3, 1.0, 2.5] {
            let g = GasModel::new(1.4, alpha).unwrap();
            assert_eq!(g.mu(1.0), 1.0);
            assert_eq!(g.kappa(0.0), 0.0);
        }
        let g = GasModel::new(1.4, 2.0).unwrap();
        assert!(close(g.mu(3.0), 9.0, 1e-15));
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi_convex(1.0).unwrap(), 0.0);
        assert!(close(phi_convex(E).unwrap(), E - 2.0, 1e-15));
        assert!(close(
            phi_convex(0.5).unwrap(),
            0.193_147_180_559_945_3,
            1e-14
        ));
        assert!(phi_convex(0.0).is_err());
        assert!(phi_convex(-1.0).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let g2 = GasModel::new(2.0, 1.0).unwrap();
        let r = PrimitiveState::new(1.0, 0.0, 1.0);
        assert_eq!(g2.relative_entropy(&r, &r).unwrap(), (0.0, 0.0));
        let (eta, q) = g2
            .relative_entropy(&PrimitiveState::new(1.0, 1.0, 1.0), &r)
            .unwrap();
        assert!(close(eta, 0.5, 1e-15));
        assert!(close(q, 0.5, 1e-15));
        assert!(g2
            .relative_entropy(&PrimitiveState::vacuum(0.0), &r)
            .is_err());
    }

    /// The first line of the relative entropy definition, written directly
    /// in terms of `rho S`, must agree with the `Phi` form.
    #[test]
    fn relative_entropy_matches_unexpanded_form() {
        let g = GasModel::new(1.4, 1.0).unwrap();
        let r = PrimitiveState::new(0.8, 0.3, 1.3);
        let s = PrimitiveState::new(1.1, -0.2, 0.9);
        let sb = g.entropy(&r).unwrap();
        let ss = g.entropy(&s).unwrap();
        let direct = s.rho * s.theta - r.theta * s.rho * ss
            + s.rho * ((sb - g.gamma()) * r.theta + 0.5 * (s.u - r.u) * (s.u - r.u))
            + (g.gamma() - 1.0) * r.rho * r.theta;
        let (eta, _) = g.relative_entropy(&s, &r).unwrap();
        assert!(close(eta, direct, 1e-13), "{eta} vs {direct}");
    }

    #[test]
    fn f_beta_and_hessian() {
        for gamma in [1.2, 1.4, 2.0, 3.0] {
            let g = GasModel::new(gamma, 1.0).unwrap();
            assert_eq!(g.f_beta(0.75, 1.0, 1.0).unwrap(), 0.0);
            let h = g.hessian_f_beta(0.75).unwrap();
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            assert!(close(det, g.hessian_det_f_beta(0.75).unwrap(), 1e-14));
            assert!(det > 0.0);
        }
        let g2 = GasModel::new(2.0, 1.0).unwrap();
        assert!(close(
            g2.hessian_det_f_beta(0.75).unwrap(),
            1.0 / 3.0,
            1e-15
        ));
        assert!(g2.f_beta(1.0, 1.0, 1.0).is_err());
        assert!(g2.f_beta(0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn f_beta_positive_near_one() {
        let g = GasModel::new(1.4, 1.0).unwrap();
        let n = 81;
        for i in 0..n {
            for j in 0..n {
                let x1 = 0.9 + 0.2 * i as f64 / (n - 1) as f64;
                let x2 = 0.9 + 0.2 * j as f64 / (n - 1) as f64;
                if i == n / 2 && j == n / 2 {
                    continue;
                }
                assert!(g.f_beta(0.75, x1, x2).unwrap() > 0.0, "({x1}, {x2})");
            }
        }
    }

    #[test]
    fn hessian_matches_finite_differences() {
        for gamma in [1.2, 1.4, 5.0 / 3.0, 2.0, 3.0] {
            let g = GasModel::new(gamma, 1.0).unwrap();
            let f = |a: f64, b: f64| g.f_beta(0.75, a, b).unwrap();
            let h = 1e-4;
            let fxx = (f(1.0 + h, 1.0) - 2.0 * f(1.0, 1.0) + f(1.0 - h, 1.0)) / (h * h);
            let fyy = (f(1.0, 1.0 + h) - 2.0 * f(1.0, 1.0) + f(1.0, 1.0 - h)) / (h * h);
            let fxy = (f(1.0 + h, 1.0 + h) - f(1.0 + h, 1.0 - h) - f(1.0 - h, 1.0 + h)
                + f(1.0 - h, 1.0 - h))
                / (4.0 * h * h);
            let m = g.hessian_f_beta(0.75).unwrap();
            assert!(
                (fxx - m[0][0]).abs() < 1e-6,
                "gamma {gamma}: {fxx} vs {}",
                m[0][0]
            );
            assert!((fyy - m[1][1]).abs() < 1e-6);
            assert!((fxy - m[0][1]).abs() < 1e-6);
        }
    }
}
