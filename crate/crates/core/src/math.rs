//! Elementary functions that work with and without `std`.

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        x.powf(y)
    }
    #[inline]
    pub fn tanh(x: f64) -> f64 {
        x.tanh()
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    #[inline]
    pub fn tanh(x: f64) -> f64 {
        libm::tanh(x)
    }
}

pub use imp::*;

/// `x^p` with fast paths for the exponents that show up in practice.
#[inline]
pub fn pow_fast(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p == 1.0 {
        x
    } else if p == 0.5 {
        sqrt(x)
    } else if p == 2.0 {
        x * x
    } else {
        powf(x, p)
    }
}

/// `sech^2(z)` evaluated without cancellation for large `|z|`.
#[inline]
pub fn sech2(z: f64) -> f64 {
    let e = exp(-2.0 * z.abs());
    4.0 * e / ((1.0 + e) * (1.0 + e))
}
