//! Fisher information on the linear absorption coefficient.
//!
//! Every quantity is per probe shot: one use of `n_in` photons. Repeating the
//! measurement `M` times multiplies the information by `M`.
//!
//! All of the closed forms share the sensitivity factor
//! `s = L eta / (1 + eta kappa) = |d eta / d a|`, so that
//!
//! | probe            | F(a)                                        |
//! |------------------|---------------------------------------------|
//! | coherent         | `s^2 n_in / eta`                            |
//! | Fock / bound     | `s^2 n_in / (eta (1 - eta))`                |
//! | squeezed (R dB)  | `s^2 n_in / (eta^2 10^(-R/10) + eta (1-eta))` |

use crate::model::{transmission, ProbeKind, ProbeSpec, SampleSpec};
use crate::{Error, Result};

/// Information value that may be unbounded (zero output variance, or a
/// lossless sample for the quantum bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Information {
    Finite(f64),
    Unbounded,
}

impl Information {
    pub fn finite(self) -> Option<f64> {
        match self {
            Information::Finite(v) => Some(v),
            Information::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Information::Unbounded)
    }

    /// Finite value, or `+inf` for callers that want plain floating point.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Information {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            Information::Finite(v) => s.serialize_f64(*v),
            Information::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

/// Photon-number variance after a beam-splitter loss of transmission `eta`.
pub fn output_variance_linear_loss(eta: f64, n_in: f64, var_in: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain("output_variance_linear_loss", "eta must lie in [0, 1]"));
    }
    if !(n_in >= 0.0) || !(var_in >= 0.0) {
        return Err(Error::domain("output_variance_linear_loss", "negative photon number or variance"));
    }
    Ok(eta * eta * var_in + eta * (1.0 - eta) * n_in)
}

/// Error propagation from the output photon-number variance:
/// `F(a) = (d eta/d a)^2 n_in^2 / Var(n)`.
pub fn fisher_from_variance(deta_da: f64, n_in: f64, var_out: f64) -> Result<Information> {
    if !(var_out >= 0.0) {
        return Err(Error::domain("fisher_from_variance", "negative variance"));
    }
    if deta_da == 0.0 {
        return Ok(Information::Finite(0.0));
    }
    if var_out == 0.0 {
        return Ok(Information::Unbounded);
    }
    Ok(Information::Finite(deta_da * deta_da * n_in * n_in / var_out))
}

fn check_kappa(op: &'static str, kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, "kappa must be positive and finite"))
    }
}

/// `(eta, L eta / (1 + eta kappa), n_in)` for the sample at strength `kappa`.
fn sensitivity(sample: &SampleSpec, kappa: f64) -> Result<(f64, f64, f64)> {
    let eta = transmission(kappa, sample.optical_depth())?;
    let s = sample.length() * eta / (1.0 + eta * kappa);
    Ok((eta, s, sample.mean_photons(kappa)))
}

/// Coherent-state FI, `(L eta / (1 + eta kappa))^2 n_in / eta`.
pub fn fisher_coherent(sample: &SampleSpec, kappa: f64) -> Result<f64> {
    check_kappa("fisher_coherent", kappa)?;
    let (eta, s, n_in) = sensitivity(sample, kappa)?;
    if eta == 0.0 {
        return Ok(0.0);
    }
    Ok(s * s * n_in / eta)
}

/// Single-mode QFI bound, `(L eta / (1 + eta kappa))^2 n_in / (eta (1 - eta))`.
///
/// Unbounded for a lossless sample (`aL = 0`).
pub fn qfi_bound(sample: &SampleSpec, kappa: f64) -> Result<Information> {
    check_kappa("qfi_bound", kappa)?;
    let (eta, s, n_in) = sensitivity(sample, kappa)?;
    if eta >= 1.0 {
        return Ok(Information::Unbounded);
    }
    if eta == 0.0 {
        return Ok(Information::Finite(0.0));
    }
    Ok(Information::Finite(s * s * n_in / (eta * (1.0 - eta))))
}

/// Fock-state FI, computed through the output-variance route rather than the
/// closed form of [`qfi_bound`]; the two agree identically.
pub fn fisher_fock(sample: &SampleSpec, kappa: f64) -> Result<Information> {
    check_kappa("fisher_fock", kappa)?;
    let (eta, s, n_in) = sensitivity(sample, kappa)?;
    let var = output_variance_linear_loss(eta, n_in, 0.0)?;
    fisher_from_variance(s, n_in, var)
}

/// Bright amplitude-squeezed FI with squeezing `squeezing_db` (dB, >= 0).
pub fn fisher_squeezed(sample: &SampleSpec, kappa: f64, squeezing_db: f64) -> Result<f64> {
    check_kappa("fisher_squeezed", kappa)?;
    if !(squeezing_db >= 0.0) {
        return Err(Error::domain("fisher_squeezed", "squeezing must be >= 0 dB"));
    }
    let (eta, s, n_in) = sensitivity(sample, kappa)?;
    if eta == 0.0 {
        return Ok(0.0);
    }
    let reduction = libm::pow(10.0, -squeezing_db / 10.0);
    let denom = eta * eta * reduction + eta * (1.0 - eta);
    if denom == 0.0 {
        // Lossless sample with infinite squeezing: no information about a anyway.
        return Ok(0.0);
    }
    Ok(s * s * n_in / denom)
}

/// Quantum advantage `Q(a) / F_c(a) = 1 / (1 - eta)`.
pub fn quantum_advantage(sample: &SampleSpec, kappa: f64) -> Result<Information> {
    check_kappa("quantum_advantage", kappa)?;
    let eta = transmission(kappa, sample.optical_depth())?;
    if eta >= 1.0 {
        return Ok(Information::Unbounded);
    }
    Ok(Information::Finite(1.0 / (1.0 - eta)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct WeakAdvantage {
    pub value: Information,
    /// `kappa >= 1` and `aL <= 1 + kappa`.
    pub valid: bool,
}

/// Weak-absorption approximation of the advantage, `(1 + kappa) / (aL)`.
pub fn quantum_advantage_weak(kappa: f64, optical_depth: f64) -> Result<WeakAdvantage> {
    check_kappa("quantum_advantage_weak", kappa)?;
    if !(optical_depth >= 0.0 && optical_depth.is_finite()) {
        return Err(Error::domain("quantum_advantage_weak", "optical depth must be >= 0"));
    }
    let valid = kappa >= 1.0 && optical_depth <= 1.0 + kappa;
    let value = if optical_depth == 0.0 {
        Information::Unbounded
    } else {
        Information::Finite((1.0 + kappa) / optical_depth)
    };
    Ok(WeakAdvantage { value, valid })
}

/// How the sensitivity factor is scaled by a detector efficiency `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DetectorConvention {
    /// `L eta gamma / (gamma + eta kappa)`.
    #[default]
    Printed,
    /// `L eta gamma / (1 + eta kappa)`: chain rule through `eta_m = gamma eta`.
    Propagated,
}

/// FI on `a` from the detected photon number, for a detector of efficiency
/// `gamma` in (0, 1]. The output variance is that of the probe after the
/// combined loss `eta gamma`.
pub fn fisher_detected(
    sample: &SampleSpec,
    kappa: f64,
    probe: ProbeKind,
    gamma: f64,
    convention: DetectorConvention,
) -> Result<Information> {
    check_kappa("fisher_detected", kappa)?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::domain("fisher_detected", "detector efficiency must lie in (0, 1]"));
    }
    if let ProbeKind::AmplitudeSqueezed { squeezing_db } = probe {
        if !(squeezing_db >= 0.0) {
            return Err(Error::domain("fisher_detected", "squeezing must be >= 0 dB"));
        }
    }
    let eta = transmission(kappa, sample.optical_depth())?;
    let n_in = sample.mean_photons(kappa);
    let eta_m = eta * gamma;
    let var = output_variance_linear_loss(eta_m, n_in, probe.input_variance(n_in))?;
    let denom = match convention {
        DetectorConvention::Printed => gamma + eta * kappa,
        DetectorConvention::Propagated => 1.0 + eta * kappa,
    };
    let s = sample.length() * eta * gamma / denom;
    fisher_from_variance(s, n_in, var)
}

/// Precision summary for one probe/sample/detector configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PrecisionReport {
    pub eta: f64,
    pub fi_per_shot: Information,
    pub fisher_coherent: f64,
    pub qfi_bound: Information,
    /// `Q / F_c` at this operating point.
    pub advantage: Information,
    pub probe: ProbeSpec,
    pub sample: SampleSpec,
    pub detector_efficiency: f64,
}

pub fn precision_report(
    sample: &SampleSpec,
    probe: &ProbeSpec,
    detector_efficiency: f64,
    convention: DetectorConvention,
) -> Result<PrecisionReport> {
    let kappa = probe.kappa();
    Ok(PrecisionReport {
        eta: transmission(kappa, sample.optical_depth())?,
        fi_per_shot: fisher_detected(sample, kappa, probe.kind(), detector_efficiency, convention)?,
        fisher_coherent: fisher_coherent(sample, kappa)?,
        qfi_bound: qfi_bound(sample, kappa)?,
        advantage: quantum_advantage(sample, kappa)?,
        probe: *probe,
        sample: *sample,
        detector_efficiency,
    })
}
