//! Precision limits for absorption measurements of saturable samples.
//!
//! The crate is `no_std` (it needs `alloc`) and covers:
//!
//! - [`special_fn`]: real Wright Omega and principal-branch Lambert W.
//! - [`model`]: saturable transmission, intensity profile along the sample,
//!   inversion of a measured transmission and unit conversion.
//! - [`fisher`]: Fisher information for coherent, Fock and amplitude-squeezed
//!   probes, the single-mode quantum bound and detector-loss corrections.
//! - [`optimize`]: optimal probe power and sample length, equal-precision
//!   power reduction and the two worked measurement scenarios.
//! - [`lindblad`]: a fully quantum slice-by-slice propagation of the probe
//!   through a sample of two-level absorbers.
//!
//! Internally everything is expressed in the dimensionless pair
//! `(kappa, optical_depth)`, where `kappa = 2 n_in / n_s` and
//! `optical_depth = a L`. Physical units only appear at the [`model`]
//! boundary.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod fisher;
pub mod lindblad;
pub mod model;
pub mod optimize;
pub mod search;
pub mod special_fn;

pub use error::{Error, Result};
pub use fisher::{
    fisher_coherent, fisher_detected, fisher_fock, fisher_from_variance, fisher_squeezed,
    output_variance_linear_loss, precision_report, qfi_bound, quantum_advantage,
    quantum_advantage_weak, DetectorConvention, Information, PrecisionReport, WeakAdvantage,
};
pub use model::{
    infer_absorption, intensity_profile, intensity_to_kappa, kappa_to_intensity,
    transmission, transmission_derivative_a, Intensity, IntensityUnit, Microscopic, ProbeKind,
    ProbeSpec, SampleSpec,
};
pub use special_fn::{lambert_w0, wright_omega, wright_omega_derivative};

/// `10 log10(ratio)`, the convention used for every FI and power comparison.
pub fn decibels(ratio: f64) -> f64 {
    10.0 * libm::log10(ratio)
}
