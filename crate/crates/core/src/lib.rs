//! Spectral engine for vibrational polaritons.
//!
//! A single cavity mode couples to an ensemble of anharmonic vibrations. A
//! pump leaves a constant fraction `f_pu` of the molecules in their first
//! excited state, and the probe response of that transient system is what the
//! crate computes:
//!
//! - [`response`]: closed-form susceptibilities, the pumped transmission
//!   transfer function, reflection, differential transmission, and the linear
//!   absorption estimates.
//! - [`modes`]: the 3x3 mode-coupling matrices whose eigenvalues are the
//!   resonances of the transfer function, plus the cubic solver behind both.
//! - [`timedomain`]: an RK4 integration of the mean-field equations of motion
//!   that reconstructs the transfer function from a probe pulse, independently
//!   of the closed forms.
//! - [`analysis`]: peak finding, parameter sweeps and least-squares fits.
//!
//! Every frequency-like quantity is a wavenumber in cm⁻¹ that is used directly
//! as an angular frequency. Times are measured in the matching internal unit
//! `1/(2πc · 1 cm⁻¹)`, see [`params::INTERNAL_TIME_UNIT_PS`].
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` deliberately treats NaN as a failed check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
mod error;
pub mod modes;
pub mod params;
pub mod response;
pub mod timedomain;

pub use error::Error;
pub use num_complex::Complex64;
pub use params::{DerivedRates, Field, SpectralGrid, SystemParams};

pub type Result<T> = core::result::Result<T, Error>;
