//! Independent reference computations used by the property suites: the
//! 3-Riemann invariant by quadrature, the fan by root finding, and finite
//! differences.

use rarefy_core::{GasModel, PrimitiveState, Result};

// Published Gauss-Kronrod nodes and weights, kept at full printed precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate of `f` on `[a, b]` and its difference from the
/// embedded 7-point Gauss rule.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let s = f(c - h * x) + f(c + h * x);
        k += w * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection until each piece meets `tol` (absolute).
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut sum = 0.0;
    while let Some((a, b, tol, depth)) = stack.pop() {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth >= 40 {
            sum += v;
        } else {
            let m = 0.5 * (a + b);
            stack.push((a, m, 0.5 * tol, depth + 1));
            stack.push((m, b, 0.5 * tol, depth + 1));
        }
    }
    sum
}

/// `u - int_0^rho sqrt(p_z(z, S))/z dz` along the isentrope through `s`.
///
/// The integrand behaves like `z^{(gamma-3)/2}` at vacuum, so `[0, rho]` is
/// cut into geometrically shrinking pieces `[rho 2^{-k-1}, rho 2^{-k}]`. The
/// sum stops once the power-law bound on the remaining piece `[0, z_k]`,
/// `2 c(z_k)/(gamma-1)`, falls below `1e-16`. For `gamma` close to 1 that
/// point lies below the smallest normal double and the tail is dropped there.
pub fn sigma3_quadrature(gas: &GasModel, s: &PrimitiveState) -> Result<f64> {
    let g = gas.gamma();
    let entropy = gas.entropy(s)?;
    let slope = |z: f64| {
        let theta = gas.theta_on_isentrope(z, entropy);
        let p = gas.pressure(&PrimitiveState::new(z, 0.0, theta));
        (g * p / z).sqrt() / z
    };
    let mut hi = s.rho;
    let mut total = 0.0f64;
    for _ in 0..4000 {
        let tail = 2.0 * slope(hi) * hi / (g - 1.0);
        if tail < 1e-16 || hi < 1e-300 {
            break;
        }
        let lo = 0.5 * hi;
        total += integrate(&slope, lo, hi, 1e-15 * (1.0 + total.abs()));
        hi = lo;
    }
    Ok(s.u - total)
}

/// Fan state at `xi` found by 2-D Newton on `(rho, u)` for
/// `lambda3 = xi` and `sigma3 = sigma3(right)` along the right isentrope.
pub fn fan_state_newton(gas: &GasModel, right: &PrimitiveState, xi: f64) -> Result<PrimitiveState> {
    let entropy = gas.entropy(right)?;
    let target = gas.sigma3(right);
    let state =
        |rho: f64, u: f64| PrimitiveState::new(rho, u, gas.theta_on_isentrope(rho, entropy));
    let residual = |rho: f64, u: f64| {
        let s = state(rho, u);
        [gas.lambda3(&s) - xi, gas.sigma3(&s) - target]
    };
    let (mut rho, mut u) = (0.5 * right.rho, xi);
    for _ in 0..200 {
        let r = residual(rho, u);
        if r[0].abs().max(r[1].abs()) < 1e-15 * (1.0 + xi.abs()) {
            break;
        }
        let h = 1e-7 * rho;
        let rp = residual(rho + h, u);
        let rm = residual(rho - h, u);
        let a = [(rp[0] - rm[0]) / (2.0 * h), (rp[1] - rm[1]) / (2.0 * h)];
        // Both residuals are linear in u with unit slope.
        let det = a[0] - a[1];
        let d_rho = -(r[0] - r[1]) / det;
        let d_u = -r[0] - a[0] * d_rho;
        let mut step = 1.0;
        while rho + step * d_rho <= 0.0 {
            step *= 0.5;
        }
        rho += step * d_rho;
        u += step * d_u;
    }
    Ok(state(rho, u))
}

/// Central first difference.
pub fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central second difference.
pub fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_is_exact_on_polynomials_and_smooth_functions() {
        let v = integrate(&|x| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-14);
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
        let v = integrate(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn sigma3_oracle_matches_closed_form() {
        for gamma in [1.2, 1.4, 5.0 / 3.0, 2.0] {
            let gas = GasModel::new(gamma, 1.0).unwrap();
            let s = PrimitiveState::new(0.7, 0.3, 1.9);
            let q = sigma3_quadrature(&gas, &s).unwrap();
            assert!(
                (q - gas.sigma3(&s)).abs() < 1e-10,
                "{gamma}: {q} {}",
                gas.sigma3(&s)
            );
        }
    }

    #[test]
    fn newton_fan_lies_on_the_wave() {
        let gas = GasModel::new(1.4, 1.0).unwrap();
        let right = PrimitiveState::new(1.0, 0.0, 1.0);
        let s = fan_state_newton(&gas, &right, 0.2).unwrap();
        assert!((gas.lambda3(&s) - 0.2).abs() < 1e-13);
        assert!((gas.sigma3(&s) - gas.sigma3(&right)).abs() < 1e-13);
    }

    #[test]
    fn differences() {
        assert!((d1(f64::exp, 0.0, 1e-5) - 1.0).abs() < 1e-9);
        assert!((d2(f64::exp, 0.0, 1e-4) - 1.0).abs() < 1e-6);
    }
}
