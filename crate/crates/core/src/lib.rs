//! Deterministic simulator core for a hybrid wind / solar / battery DC bus.
//!
//! The crate is `no_std` (it needs `alloc` for scenario profiles and
//! time series). It contains:
//!
//! - [`models`]: turbine aerodynamics and drivetrain, single-diode PV panel
//!   driven through a loss-free-resistor port, and battery energy bookkeeping.
//! - [`controllers`]: perturb-and-observe wind MPPT, extremum-seeking solar
//!   MPPT, and the four-mode supervisory dispatcher.
//! - [`scenario`]: exogenous profiles and the validated scenario description.
//! - [`sim`]: the fixed-step closed-loop engine and run summaries.
//!
//! File formats, CSV output and the command line live in the `hybrid-dc`
//! companion crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod controllers;
mod error;
pub mod models;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result, ValidationError};
