//! Smoothed Burgers rarefaction.
//!
//! The initial data `w_delta(x) = (w+ + w-)/2 + (w+ - w-)/2 tanh(x/delta)`
//! is increasing, so characteristics never cross and the solution is
//! `w(x, t) = w_delta(x0)` where the foot `x0` solves
//! `F(x0) = x0 + w_delta(x0) t - x = 0`. Since `F' = 1 + t w_delta' >= 1`
//! the root is unique and lies in `[x - w+ t, x - w- t]`.

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersProfile {
    w_minus: f64,
    w_plus: f64,
    delta: f64,
}

/// Solution value and space derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersPoint {
    pub w: f64,
    /// Foot of the characteristic through `(x, t)`.
    pub x0: f64,
    pub w_x: f64,
    pub w_xx: f64,
}

impl BurgersProfile {
    pub fn new(w_minus: f64, w_plus: f64, delta: f64) -> Result<Self> {
        if !(w_minus < w_plus) || !w_minus.is_finite() || !w_plus.is_finite() {
            return Err(Error::InvalidParameter {
                name: "w_plus - w_minus",
                value: w_plus - w_minus,
                expected: "w_minus < w_plus",
            });
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                expected: "delta > 0",
            });
        }
        Ok(Self {
            w_minus,
            w_plus,
            delta,
        })
    }

    pub fn w_minus(&self) -> f64 {
        self.w_minus
    }

    pub fn w_plus(&self) -> f64 {
        self.w_plus
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn half_jump(&self) -> f64 {
        0.5 * (self.w_plus - self.w_minus)
    }

    /// Initial data `w_delta(x)`.
    pub fn w_init(&self, x: f64) -> f64 {
        0.5 * (self.w_plus + self.w_minus) + self.half_jump() * math::tanh(x / self.delta)
    }

    /// `w_delta'(x)`, strictly positive.
    pub fn w_init_x(&self, x: f64) -> f64 {
        self.half_jump() / self.delta * math::sech2(x / self.delta)
    }

    /// `w_delta''(x) = -(2/delta) tanh(x/delta) w_delta'(x)`.
    pub fn w_init_xx(&self, x: f64) -> f64 {
        let z = x / self.delta;
        -2.0 / self.delta * math::tanh(z) * self.w_init_x(x)
    }

    /// Foot `x0` of the characteristic through `(x, t)`. `guess` is an
    /// optional warm start; it is ignored when it falls outside the bracket.
    pub fn foot(&self, x: f64, t: f64, guess: Option<f64>) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                expected: "t >= 0",
            });
        }
        if t == 0.0 {
            return Ok(x);
        }
        let mut lo = x - self.w_plus * t;
        let mut hi = x - self.w_minus * t;
        let mut x0 = match guess {
            Some(g) if g > lo && g < hi => g,
            _ => {
                // Linear characteristic through the origin of the fan is a
                // good start inside the fan; clamp to the bracket otherwise.
                let mid = x - self.w_init(x) * t;
                if mid > lo && mid < hi {
                    mid
                } else {
                    0.5 * (lo + hi)
                }
            }
        };
        let tol = 1e-14 * (1.0 + x.abs());
        let mut residual = f64::INFINITY;
        let mut step_before_last = hi - lo;
        let mut last_step = step_before_last;
        for _ in 0..MAX_ITERATIONS {
            let f = x0 + self.w_init(x0) * t - x;
            residual = f.abs();
            if residual <= tol {
                return Ok(x0);
            }
            if f > 0.0 {
                hi = x0;
            } else {
                lo = x0;
            }
            let slope = 1.0 + t * self.w_init_x(x0);
            let mut next = x0 - f / slope;
            // Bisect when Newton leaves the bracket or stops halving the step
            // (it can cycle on the flat tails of the tanh profile).
            if !(next > lo && next < hi) || 2.0 * (next - x0).abs() > step_before_last.abs() {
                next = 0.5 * (lo + hi);
            }
            step_before_last = last_step;
            last_step = next - x0;
            if next == x0 || hi - lo <= 2.0 * f64::EPSILON * (1.0 + x0.abs()) {
                // The bracket is exhausted in floating point.
                return Ok(x0);
            }
            x0 = next;
        }
        Err(Error::NoConvergence {
            what: "characteristic foot",
            iterations: MAX_ITERATIONS,
            residual,
        })
    }

    /// `(w, x0)` at `(x, t)`.
    pub fn w_eval(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        let x0 = self.foot(x, t, None)?;
        Ok((self.w_init(x0), x0))
    }

    /// Value and derivatives at `(x, t)`, optionally warm-started.
    pub fn eval(&self, x: f64, t: f64, guess: Option<f64>) -> Result<BurgersPoint> {
        let x0 = self.foot(x, t, guess)?;
        Ok(self.point_from_foot(x0, t))
    }

    /// Value and derivatives on the characteristic starting at `x0`.
    /// The corresponding position is `x0 + w t`.
    pub fn point_from_foot(&self, x0: f64, t: f64) -> BurgersPoint {
        let wp = self.w_init_x(x0);
        let stretch = 1.0 + t * wp;
        BurgersPoint {
            w: self.w_init(x0),
            x0,
            w_x: wp / stretch,
            w_xx: self.w_init_xx(x0) / (stretch * stretch * stretch),
        }
    }

    /// `(w_x, w_xx)` at `(x, t)`.
    pub fn w_derivs(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        let p = self.eval(x, t, None)?;
        Ok((p.w_x, p.w_xx))
    }

    /// Centered rarefaction `w^r(xi)` of the unsmoothed Riemann problem.
    pub fn sharp_wave(&self, xi: f64) -> f64 {
        sharp_wave(xi, self.w_minus, self.w_plus)
    }

    /// `sup_x |w(x, t) - w^r(x/t)|` for `t > 0`, evaluated along
    /// characteristics so no root solve is needed.
    pub fn sharp_distance(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                expected: "t > 0",
            });
        }
        let gap = |x0: f64| {
            let w = self.w_init(x0);
            (w - self.sharp_wave(x0 / t + w)).abs()
        };
        let reach = 1.2 * (2.0 * self.half_jump() * t).min(60.0 * self.delta);
        let n = 20_001;
        let h = 2.0 * reach / (n - 1) as f64;
        let mut best = (0.0, 0.0);
        for i in 0..n {
            let x0 = -reach + h * i as f64;
            let g = gap(x0);
            if g > best.1 {
                best = (x0, g);
            }
        }
        // Golden-section refinement around the best sample.
        let (mut a, mut b) = (best.0 - h, best.0 + h);
        let r = 0.5 * (math::sqrt(5.0) - 1.0);
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        for _ in 0..80 {
            if gap(c) > gap(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - r * (b - a);
            d = a + r * (b - a);
        }
        Ok(best.1.max(gap(0.5 * (a + b))))
    }

    /// Lebesgue norms of `w_x` and `w_xx` at time `t > 0` compared with
    /// `(w+ - w-)^{1/p} (delta + t)^{-1+1/p}` and
    /// `(delta + t)^{-1} delta^{-1+1/p}`. Use `f64::INFINITY` for the sup norm.
    pub fn lp_report(&self, t: f64, p_list: &[f64]) -> Result<LpReport> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                expected: "t > 0",
            });
        }
        // Integrate in the foot variable: dx = (1 + t w_delta'(x0)) dx0, and
        // every integrand decays like sech^2(x0/delta).
        let reach = 40.0 * self.delta;
        let n = 16_000; // even number of intervals for Simpson
        let h = 2.0 * reach / n as f64;
        let pts: Vec<(BurgersPoint, f64)> = (0..=n)
            .map(|i| {
                let x0 = -reach + h * i as f64;
                let p = self.point_from_foot(x0, t);
                (p, 1.0 + t * self.w_init_x(x0))
            })
            .collect();
        let der22 = pts
            .iter()
            .map(|(p, _)| p.w_xx.abs() / (4.0 / self.delta * p.w_x))
            .fold(0.0, f64::max);
        let jump = self.w_plus - self.w_minus;
        let mut entries = Vec::with_capacity(p_list.len());
        for &p in p_list {
            let (nx, nxx) = if p.is_infinite() {
                pts.iter().fold((0.0f64, 0.0f64), |acc, (q, _)| {
                    (acc.0.max(q.w_x), acc.1.max(q.w_xx.abs()))
                })
            } else {
                let mut sx = 0.0;
                let mut sxx = 0.0;
                for (i, (q, jac)) in pts.iter().enumerate() {
                    let wgt = if i == 0 || i == n {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    sx += wgt * math::powf(q.w_x, p) * jac;
                    sxx += wgt * math::powf(q.w_xx.abs(), p) * jac;
                }
                (
                    math::powf(sx * h / 3.0, 1.0 / p),
                    math::powf(sxx * h / 3.0, 1.0 / p),
                )
            };
            let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
            let bound_x = math::powf(jump, inv_p) * math::powf(self.delta + t, -1.0 + inv_p);
            let bound_xx = 1.0 / (self.delta + t) * math::powf(self.delta, -1.0 + inv_p);
            entries.push(LpEntry {
                p,
                norm_w_x: nx,
                norm_w_xx: nxx,
                ratio_w_x: nx / bound_x,
                ratio_w_xx: nxx / bound_xx,
            });
        }
        Ok(LpReport {
            t,
            delta: self.delta,
            entries,
            der22_max_ratio: der22,
        })
    }
}

/// `w^r(xi)`: `w-` left of the fan, `xi` inside, `w+` right of it.
pub fn sharp_wave(xi: f64, w_minus: f64, w_plus: f64) -> f64 {
    if xi <= w_minus {
        w_minus
    } else if xi >= w_plus {
        w_plus
    } else {
        xi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpEntry {
    pub p: f64,
    pub norm_w_x: f64,
    pub norm_w_xx: f64,
    pub ratio_w_x: f64,
    pub ratio_w_xx: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpReport {
    pub t: f64,
    pub delta: f64,
    pub entries: Vec<LpEntry>,
    /// `max |w_xx| / ((4/delta) w_x)` over the quadrature nodes; at most 1.
    pub der22_max_ratio: f64,
}

impl LpReport {
    pub fn max_ratio_w_x(&self) -> f64 {
        self.entries.iter().map(|e| e.ratio_w_x).fold(0.0, f64::max)
    }

    pub fn max_ratio_w_xx(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.ratio_w_xx)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(delta: f64) -> BurgersProfile {
        BurgersProfile::new(-1.0, 1.0, delta).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BurgersProfile::new(1.0, 1.0, 0.1).is_err());
        assert!(BurgersProfile::new(-1.0, 1.0, 0.0).is_err());
        assert!(unit(0.1).foot(0.0, -1.0, None).is_err());
    }

    #[test]
    fn initial_data() {
        let b = BurgersProfile::new(-0.5, 2.0, 0.3).unwrap();
        assert_eq!(b.w_init(0.0), 0.75);
        assert!((b.w_init(1e3) - 2.0).abs() < 1e-15);
        assert!((b.w_init(-1e3) + 0.5).abs() < 1e-15);
        assert!((unit(1.0).w_init(1.0) - 0.761_594_155_955_764_9).abs() < 1e-15);
    }

    #[test]
    fn time_zero_and_symmetry() {
        let b = unit(0.2);
        let (w, x0) = b.w_eval(0.37, 0.0).unwrap();
        assert_eq!((w, x0), (b.w_init(0.37), 0.37));
        assert_eq!(b.w_derivs(0.37, 0.0).unwrap().0, b.w_init_x(0.37));
        for t in [0.1, 1.0, 10.0, 1e3] {
            let (w, x0) = b.w_eval(0.0, t).unwrap();
            assert!(w.abs() < 1e-15 && x0.abs() < 1e-15);
        }
    }

    #[test]
    fn late_time_approaches_sharp_wave() {
        let b = unit(0.1);
        let (w, _) = b.w_eval(0.5, 100.0).unwrap();
        let t: f64 = 100.0;
        let bound = 0.1 / t * ((1.0 + t).ln() + 0.1f64.ln().abs());
        assert!((w - 0.005).abs() <= bound, "{w}");
    }

    #[test]
    fn residual_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for delta in [1e-1, 1e-2, 1e-3] {
            let b = BurgersProfile::new(-0.8, 1.3, delta).unwrap();
            for _ in 0..20_000 {
                let x = rng.gen_range(-20.0..20.0);
                let t = rng.gen_range(0.0..10.0);
                let (w, x0) = b.w_eval(x, t).unwrap();
                let f = x0 + w * t - x;
                assert!(f.abs() <= 1e-12 * (1.0 + x.abs()), "x {x} t {t} res {f}");
                assert!(
                    w > b.w_minus() && w < b.w_plus()
                        || (w - b.w_minus()).abs() < 1e-15
                        || (w - b.w_plus()).abs() < 1e-15
                );
            }
            let t = 3.0;
            let mut prev = f64::NEG_INFINITY;
            for i in 0..2000 {
                let x = -5.0 + 10.0 * i as f64 / 1999.0;
                let (w, _) = b.w_eval(x, t).unwrap();
                assert!(w >= prev);
                prev = w;
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = BurgersProfile::new(-0.4, 0.9, 0.3).unwrap();
        for _ in 0..100 {
            let x = rng.gen_range(-3.0..3.0);
            let t = rng.gen_range(0.0..5.0);
            let h = 1e-5 * b.delta().max(1.0);
            let w = |x: f64| b.w_eval(x, t).unwrap().0;
            let wx_fd = (w(x + h) - w(x - h)) / (2.0 * h);
            let hh = 1e-3 * b.delta();
            let wxx_fd = (w(x + hh) - 2.0 * w(x) + w(x - hh)) / (hh * hh);
            let (wx, wxx) = b.w_derivs(x, t).unwrap();
            assert!(wx > 0.0);
            assert!(
                (wx - wx_fd).abs() <= 1e-6 * wx.abs().max(1e-3),
                "{wx} {wx_fd}"
            );
            assert!(
                (wxx - wxx_fd).abs() <= 1e-4 * wxx.abs().max(1e-2),
                "{wxx} {wxx_fd}"
            );
            assert!(wxx.abs() <= 4.0 / b.delta() * wx);
        }
    }

    #[test]
    fn sharp_wave_branches() {
        assert_eq!(sharp_wave(0.25, -0.5, 1.0), 0.25);
        assert_eq!(sharp_wave(-5.5, -0.5, 1.0), -0.5);
        assert_eq!(sharp_wave(6.0, -0.5, 1.0), 1.0);
    }

    #[test]
    fn lp_norms() {
        let b = BurgersProfile::new(-1.0, 1.0, 0.01).unwrap();
        let r = b.lp_report(10.0, &[1.0, 2.0, f64::INFINITY]).unwrap();
        // L1 norm of w_x is the total jump.
        assert!((r.entries[0].norm_w_x - 2.0).abs() < 1e-8);
        // Sup of w_x is about 1/t well inside the fan.
        let sup = r.entries[2].norm_w_x;
        assert!(sup > 0.09 && sup < 0.1, "{sup}");
        assert!(r.der22_max_ratio <= 0.5 + 1e-12);
    }

    #[test]
    fn sharp_distance_matches_brute_force() {
        let b = BurgersProfile::new(-1.0, 0.5, 0.05).unwrap();
        let t = 2.0;
        let fine = (0..200_001)
            .map(|i| -4.0 + 8.0 * i as f64 / 200_000.0)
            .map(|x| (b.w_eval(x, t).unwrap().0 - b.sharp_wave(x / t)).abs())
            .fold(0.0, f64::max);
        let d = b.sharp_distance(t).unwrap();
        assert!(d >= fine - 1e-12 && d - fine < 1e-6, "{d} vs {fine}");
    }
}
