//! Fully quantum propagation of a probe mode through a sample cut into
//! slices of `N_a` two-level absorbers.
//!
//! Each slice starts with all absorbers in `|g>`, evolves jointly with the
//! field for `tau_int` under a Lindblad master equation, and hands the
//! absorber-traced field state to the next slice.

mod density;
mod integrator;
mod operators;

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

pub use density::{photon_statistics, DensityMatrix, FieldState, PhotonStatistics};
pub use integrator::{integrate, IntegratorSpec, LindbladGenerator, StepStats, DEFAULT_TOLERANCE};
pub use operators::{build_operators, OperatorSet, SparseOperator};

use core::f64::consts::PI;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Largest Hilbert-space dimension accepted by [`QuantumSimConfig::validate`].
pub const MAX_DIMENSION: usize = 4096;

/// Trace, excitation and positivity tolerance at slice boundaries.
pub const INVARIANT_TOLERANCE: f64 = 1e-8;

/// Interaction rate for a probe focused to area `alpha lambda^2` on absorbers
/// whose linewidth is `beta` times the radiative one:
/// `g = sqrt(3 / (2 alpha)) * 3 / (pi^2 beta)`.
pub fn coupling_strength(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::domain("coupling_strength", "alpha and beta must be positive"));
    }
    Ok(libm::sqrt(3.0 / (2.0 * alpha)) * 3.0 / (PI * PI * beta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum InputState {
    Coherent { n_mean: f64 },
    Fock { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct QuantumSimConfig {
    pub n_absorbers_per_slice: usize,
    pub n_slices: usize,
    pub fock_dim: usize,
    pub tau_int: f64,
    pub g: f64,
    pub gamma_sp: f64,
    pub gamma_dp: f64,
    pub input_state: InputState,
    #[cfg_attr(feature = "serde", serde(default))]
    pub integrator: IntegratorSpec,
    /// Largest probability mass a coherent input may lose to truncation.
    #[cfg_attr(feature = "serde", serde(default = "default_truncation_tolerance"))]
    pub truncation_tolerance: f64,
    /// Compute the smallest eigenvalue of the joint state after every slice.
    #[cfg_attr(feature = "serde", serde(default = "default_true"))]
    pub check_positivity: bool,
}

#[cfg(feature = "serde")]
fn default_truncation_tolerance() -> f64 {
    INVARIANT_TOLERANCE
}

#[cfg(feature = "serde")]
fn default_true() -> bool {
    true
}

impl QuantumSimConfig {
    /// Reduced configuration: 2 absorbers per slice, 16 Fock levels, 10 slices.
    pub fn reduced(input_state: InputState) -> Self {
        QuantumSimConfig {
            n_absorbers_per_slice: 2,
            n_slices: 10,
            fock_dim: 16,
            tau_int: 1.0,
            g: 0.1,
            gamma_sp: 0.5,
            gamma_dp: 2.0,
            input_state,
            integrator: IntegratorSpec::default(),
            truncation_tolerance: INVARIANT_TOLERANCE,
            check_positivity: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.fock_dim.saturating_mul(1usize.checked_shl(self.n_absorbers_per_slice as u32).unwrap_or(usize::MAX))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_absorbers_per_slice == 0 {
            return Err(Error::config("n_absorbers_per_slice", "must be >= 1"));
        }
        if self.n_slices == 0 {
            return Err(Error::config("n_slices", "must be >= 1"));
        }
        if self.fock_dim < 2 {
            return Err(Error::config("fock_dim", "must be >= 2"));
        }
        if self.n_absorbers_per_slice >= 32 || self.dim() > MAX_DIMENSION {
            return Err(Error::config(
                "fock_dim",
                format!("fock_dim * 2^n_absorbers_per_slice exceeds {MAX_DIMENSION}"),
            ));
        }
        if !(self.tau_int > 0.0 && self.tau_int.is_finite()) {
            return Err(Error::config("tau_int", "must be positive"));
        }
        for (field, v) in [("g", self.g), ("gamma_sp", self.gamma_sp), ("gamma_dp", self.gamma_dp)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(field, "must be finite and >= 0"));
            }
        }
        if !(self.truncation_tolerance >= 0.0 && self.truncation_tolerance < 1.0) {
            return Err(Error::config("truncation_tolerance", "must lie in [0, 1)"));
        }
        self.integrator.validate()?;
        let field = self.input_field()?;
        if field.truncation_deficit() > self.truncation_tolerance {
            return Err(Error::config(
                "fock_dim",
                format!(
                    "coherent input loses {:.3e} of its norm to truncation (limit {:.1e})",
                    field.truncation_deficit(),
                    self.truncation_tolerance
                ),
            ));
        }
        Ok(())
    }

    /// Input field state, before the truncation check.
    pub fn input_field(&self) -> Result<FieldState> {
        match self.input_state {
            InputState::Coherent { n_mean } => FieldState::coherent(n_mean, self.fock_dim),
            InputState::Fock { n } => FieldState::fock(n, self.fock_dim),
        }
    }

    pub fn generator(&self) -> LindbladGenerator {
        LindbladGenerator::new(self.n_absorbers_per_slice, self.fock_dim, self.g, self.gamma_sp, self.gamma_dp)
    }
}

/// Right-hand side of the master equation for `rho` under `config`.
pub fn lindblad_rhs(rho: &DensityMatrix, config: &QuantumSimConfig) -> DMatrix<Complex64> {
    config.generator().rhs(rho.data())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SliceDiagnostics {
    pub trace_drift: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: Option<f64>,
    pub steps: StepStats,
}

/// Evolves the joint state for `tau_int` and checks the trace.
pub fn evolve_slice(
    rho: &mut DensityMatrix,
    generator: &LindbladGenerator,
    config: &QuantumSimConfig,
) -> Result<SliceDiagnostics> {
    let before = rho.trace();
    let steps = integrate(generator, rho.data_mut(), config.tau_int, config.integrator)?;
    let trace_drift = (rho.trace() - before).norm();
    let min_eigenvalue = config.check_positivity.then(|| rho.min_eigenvalue());
    let diag = SliceDiagnostics {
        trace_drift,
        hermiticity_error: rho.hermiticity_error(),
        min_eigenvalue,
        steps,
    };
    if !(trace_drift <= INVARIANT_TOLERANCE) {
        return Err(Error::Invariant(format!("trace drift {trace_drift:.3e} over one slice")));
    }
    if let Some(m) = min_eigenvalue {
        if !(m >= -INVARIANT_TOLERANCE) {
            return Err(Error::Invariant(format!("minimum eigenvalue {m:.3e} after slice")));
        }
    }
    Ok(diag)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SliceRecord {
    /// 0 is the input state; slice `i` is the field after `i` slices.
    pub index: usize,
    pub mean_n: f64,
    pub var_n: f64,
    pub fano_std: Option<f64>,
    pub fano_paper: Option<f64>,
    pub eta_cumulative: f64,
    pub var_semiclassical: f64,
    pub diagnostics: Option<SliceDiagnostics>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SliceTrace {
    pub slices: Vec<SliceRecord>,
    /// First slice whose mean photon number is below `N_a`.
    pub na_crossing_index: Option<usize>,
    pub input_mean: f64,
    pub input_variance: f64,
    pub truncation_deficit: f64,
}

impl SliceTrace {
    pub fn max_fano_std(&self) -> Option<f64> {
        self.slices.iter().filter_map(|s| s.fano_std).reduce(f64::max)
    }
}

/// Semi-classical variance `eta^2 var_in + eta (1 - eta) mean_in` at each cumulative transmission.
pub fn semiclassical_baseline(eta: &[f64], input_var: f64, input_mean: f64) -> Vec<f64> {
    eta.iter()
        .map(|&e| e * e * input_var + e * (1.0 - e) * input_mean)
        .collect()
}

/// Runs every slice, collecting photon statistics of the field after each.
pub fn propagate_sample(config: &QuantumSimConfig) -> Result<SliceTrace> {
    propagate_sample_with(config, |_, _| {})
}

/// As [`propagate_sample`], calling `on_slice(index, field)` after each slice.
pub fn propagate_sample_with<F>(config: &QuantumSimConfig, mut on_slice: F) -> Result<SliceTrace>
where
    F: FnMut(usize, &FieldState),
{
    config.validate()?;
    let generator = config.generator();
    let mut field = config.input_field()?;
    let truncation_deficit = field.truncation_deficit();
    let input = photon_statistics(&field);

    let mut stats = Vec::with_capacity(config.n_slices + 1);
    stats.push((input, None));
    for i in 1..=config.n_slices {
        let mut rho = DensityMatrix::with_ground_absorbers(&field, config.n_absorbers_per_slice);
        let diag = evolve_slice(&mut rho, &generator, config).map_err(|e| Error::Slice {
            index: i,
            source: Box::new(e),
        })?;
        field = rho.field_reduced();
        on_slice(i, &field);
        stats.push((photon_statistics(&field), Some(diag)));
    }

    let eta: Vec<f64> = stats
        .iter()
        .map(|(s, _)| if input.mean > 0.0 { s.mean / input.mean } else { 1.0 })
        .collect();
    let var_sc = semiclassical_baseline(&eta, input.variance, input.mean);
    let na = config.n_absorbers_per_slice as f64;
    let slices: Vec<SliceRecord> = stats
        .into_iter()
        .enumerate()
        .map(|(index, (s, diagnostics))| SliceRecord {
            index,
            mean_n: s.mean,
            var_n: s.variance,
            fano_std: s.fano_std,
            fano_paper: s.fano_paper,
            eta_cumulative: eta[index],
            var_semiclassical: var_sc[index],
            diagnostics,
        })
        .collect();
    let na_crossing_index = slices.iter().find(|s| s.mean_n < na).map(|s| s.index);
    Ok(SliceTrace {
        slices,
        na_crossing_index,
        input_mean: input.mean,
        input_variance: input.variance,
        truncation_deficit,
    })
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;

    fn jc_config() -> QuantumSimConfig {
        QuantumSimConfig {
            n_absorbers_per_slice: 1,
            n_slices: 1,
            fock_dim: 2,
            tau_int: 1.0,
            g: 0.7,
            gamma_sp: 0.0,
            gamma_dp: 0.0,
            input_state: InputState::Fock { n: 1 },
            integrator: IntegratorSpec::default(),
            truncation_tolerance: INVARIANT_TOLERANCE,
            check_positivity: true,
        }
    }

    #[test]
    fn coupling_formula() {
        let g = coupling_strength(0.5, 10.0).unwrap();
        assert!((g - 0.052_648).abs() < 1e-6, "{g}");
        let g2 = coupling_strength(0.5, 20.0).unwrap();
        assert!((g / g2 - 2.0).abs() < 1e-14);
        assert!(coupling_strength(1e12, 1.0).unwrap() < 1e-5);
        assert!(coupling_strength(0.0, 1.0).is_err());
    }

    #[test]
    fn jaynes_cummings_single_excitation() {
        let cfg = jc_config();
        let gen = cfg.generator();
        let field = FieldState::fock(1, 2).unwrap();
        for &t in &[0.1, 0.5, 1.3, 2.2, 4.0] {
            let mut rho = DensityMatrix::with_ground_absorbers(&field, 1);
            integrate(&gen, rho.data_mut(), t, cfg.integrator).unwrap();
            let n = photon_statistics(&rho.field_reduced()).mean;
            let expect = libm::cos(cfg.g * t).powi(2);
            assert!((n - expect).abs() < 1e-6, "t={t}: {n} vs {expect}");
        }
    }

    #[test]
    fn rk4_agrees_with_dopri5() {
        let cfg = jc_config();
        let gen = cfg.generator();
        let field = FieldState::fock(1, 2).unwrap();
        let mut rho = DensityMatrix::with_ground_absorbers(&field, 1);
        integrate(&gen, rho.data_mut(), 2.0, IntegratorSpec::Rk4 { step: 1e-3 }).unwrap();
        let n = photon_statistics(&rho.field_reduced()).mean;
        assert!((n - libm::cos(1.4).powi(2)).abs() < 1e-10);
    }

    #[test]
    fn zero_rates_give_zero_generator() {
        let ops = build_operators(2, 3);
        let rho = DensityMatrix::from_matrix(DMatrix::from_fn(ops.dim(), ops.dim(), |i, j| Complex64::new((i + j) as f64, 0.0)), 3, 2).unwrap();
        let mut cfg = QuantumSimConfig::reduced(InputState::Fock { n: 1 });
        cfg.fock_dim = 3;
        cfg.g = 0.0;
        cfg.gamma_sp = 0.0;
        cfg.gamma_dp = 0.0;
        assert!(lindblad_rhs(&rho, &cfg).iter().all(|x| *x == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn generator_is_traceless_and_hermitian() {
        let gen = LindbladGenerator::new(2, 4, 0.3, 0.5, 2.0);
        let d = gen.dim();
        let b = DMatrix::from_fn(d, d, |i, j| Complex64::new(libm::sin((3 * i + j) as f64), libm::cos((i * j) as f64)));
        let mut rho = &b * b.adjoint();
        let tr = rho.trace();
        rho /= tr;
        let drho = gen.rhs(&rho);
        assert!(drho.trace().norm() < 1e-12);
        assert!((&drho - drho.adjoint()).iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn excitation_conserved_without_decay() {
        let mut cfg = QuantumSimConfig::reduced(InputState::Coherent { n_mean: 3.0 });
        cfg.gamma_sp = 0.0;
        cfg.gamma_dp = 0.0;
        cfg.g = 0.4;
        cfg.truncation_tolerance = 1e-3;
        let gen = cfg.generator();
        let mut rho = DensityMatrix::with_ground_absorbers(&cfg.input_field().unwrap(), 2);
        let before = gen.total_excitation(rho.data());
        evolve_slice(&mut rho, &gen, &cfg).unwrap();
        assert!((gen.total_excitation(rho.data()) - before).abs() < 1e-8);
    }

    #[test]
    fn decoupled_field_is_untouched() {
        let mut cfg = QuantumSimConfig::reduced(InputState::Coherent { n_mean: 2.0 });
        cfg.g = 0.0;
        cfg.n_slices = 3;
        let trace = propagate_sample(&cfg).unwrap();
        for s in &trace.slices {
            assert_eq!(s.mean_n, trace.input_mean);
            assert_eq!(s.var_n, trace.input_variance);
            assert_eq!(s.eta_cumulative, 1.0);
        }
    }

    #[test]
    fn semiclassical_baseline_limits() {
        let v = semiclassical_baseline(&[1.0, 0.5, 0.2], 4.0, 4.0);
        for (x, e) in v.iter().zip([4.0, 2.0, 0.8]) {
            assert!((x - e).abs() < 1e-15);
        }
        let f = semiclassical_baseline(&[1.0, 0.5], 0.0, 6.0);
        assert_eq!(f, [0.0, 1.5]);
    }

    #[test]
    fn config_validation() {
        let mut cfg = QuantumSimConfig::reduced(InputState::Fock { n: 16 });
        assert!(matches!(cfg.validate(), Err(Error::Config { .. })));
        cfg.input_state = InputState::Coherent { n_mean: 6.0 };
        assert!(cfg.validate().is_err(), "truncation deficit should be rejected at 1e-8");
        cfg.truncation_tolerance = 1e-3;
        assert!(cfg.validate().is_ok());
        cfg.n_absorbers_per_slice = 10;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn fock_mean_decreases_along_sample() {
        let mut cfg = QuantumSimConfig::reduced(InputState::Fock { n: 6 });
        cfg.n_slices = 4;
        let t = propagate_sample(&cfg).unwrap();
        for w in t.slices.windows(2) {
            assert!(w[1].mean_n < w[0].mean_n);
        }
        for s in &t.slices {
            assert!(s.var_n <= s.var_semiclassical + 1e-12);
            let d = s.diagnostics.unwrap_or(SliceDiagnostics {
                trace_drift: 0.0,
                hermiticity_error: 0.0,
                min_eigenvalue: None,
                steps: StepStats::default(),
            });
            assert!(d.trace_drift <= 1e-8);
            assert!(d.min_eigenvalue.is_none_or(|m| m >= -1e-8));
        }
    }
}
