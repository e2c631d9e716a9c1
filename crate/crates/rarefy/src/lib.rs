//! Command-line tools around `rarefy-core`: configuration, output files,
//! concurrent sweeps and property suites.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod oracle;
pub mod output;
pub mod solver_checks;
pub mod sweep;
pub mod verify;
