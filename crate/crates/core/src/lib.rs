//! Subwavelength localization via adiabatic passage (SLAP) for far-field
//! fluorescence microscopy.
//!
//! The crate covers the driving-field optics ([`beams`]), the density-matrix
//! dynamics of a driven Lambda system ([`lambda_system`]), the closed-form
//! resolution laws ([`analytic`]), spatial scans and FWHM extraction
//! ([`localization`]) and a rate-equation STED baseline ([`sted`]).
//!
//! Internal units: angular frequencies in rad/ps, times in ps, lengths in nm.
//! Conversions from laboratory units live in [`units`].

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod beams;
mod error;
pub mod lambda_system;
pub mod localization;
pub mod ode;
pub mod sted;
pub mod units;

pub use error::{Error, Result};
