//! Numerics for the one-sided vacuum 3-rarefaction wave of the full Euler
//! system and its viscous approximation by the 1D compressible
//! Navier-Stokes equations with temperature-dependent viscosity
//! `mu(theta) = kappa(theta) = theta^alpha`.
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `std` feature to use
//! the platform math library instead of `libm`.
//!
//! Layout:
//! - [`gas`]: ideal polytropic closures, Riemann invariants, relative entropy.
//! - [`wave`]: exact vacuum wave and its density cut-off.
//! - [`burgers`]: smoothed Burgers rarefaction via characteristics.
//! - [`profile`]: smooth approximate rarefaction built from the Burgers wave.
//! - [`solver`]: finite-volume Navier-Stokes solver.
//! - [`harness`]: schedules, error norms, energy functionals and rate fits.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod burgers;
mod error;
pub mod gas;
pub mod harness;
pub mod math;
pub mod profile;
pub mod solver;
pub mod wave;

pub use error::{Error, Result};
pub use gas::{GasModel, PrimitiveState};
pub use profile::{ApproxProfile, ProfileState};
pub use wave::{CutoffState, WaveSample, WaveSetup};
