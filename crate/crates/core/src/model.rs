//! Transmission of a saturable two-level sample.
//!
//! The steady-state photon flux obeys `dN/dz = -a N / (1 + 2N/n_s)`, whose
//! solution is a Wright Omega of the input flux. All functions here take the
//! dimensionless probe strength `kappa = 2 n_in / n_s` and optical depth `aL`.

use alloc::vec::Vec;

use crate::special_fn::wright_omega;
use crate::{Error, Result};

/// Planck constant in J s (exact SI).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in m/s (exact SI).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Relative tolerance when both a macroscopic and a microscopic description are given.
const CONSISTENCY_TOLERANCE: f64 = 1e-9;

/// Photon energy `h c / lambda` in joules, wavelength in nm.
pub fn photon_energy(wavelength_nm: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum IntensityUnit {
    /// photons cm^-2 s^-1
    PhotonFlux,
    /// W cm^-2
    Irradiance,
    /// Bare number, only comparable with other dimensionless values.
    Dimensionless,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Intensity {
    pub value: f64,
    pub unit: IntensityUnit,
}

impl Intensity {
    pub fn photon_flux(value: f64) -> Self {
        Intensity {
            value,
            unit: IntensityUnit::PhotonFlux,
        }
    }

    pub fn irradiance(value: f64) -> Self {
        Intensity {
            value,
            unit: IntensityUnit::Irradiance,
        }
    }

    pub fn dimensionless(value: f64) -> Self {
        Intensity {
            value,
            unit: IntensityUnit::Dimensionless,
        }
    }

    /// Expresses this intensity in `unit`, using the wavelength (nm) when the
    /// conversion crosses between photon flux and irradiance.
    pub fn to_unit(self, unit: IntensityUnit, wavelength_nm: Option<f64>) -> Result<f64> {
        use IntensityUnit::*;
        match (self.unit, unit) {
            (a, b) if a == b => Ok(self.value),
            (Irradiance, PhotonFlux) | (PhotonFlux, Irradiance) => {
                let lambda = wavelength_nm.ok_or(Error::UnitMismatch(
                    "photon flux and irradiance need a wavelength to convert",
                ))?;
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::domain("Intensity::to_unit", "wavelength must be positive"));
                }
                let e = photon_energy(lambda);
                Ok(if self.unit == Irradiance {
                    self.value / e
                } else {
                    self.value * e
                })
            }
            _ => Err(Error::UnitMismatch(
                "dimensionless intensity cannot be converted to physical units",
            )),
        }
    }
}

/// Absorber-level description: `a = n_t sigma`, `n_s = 1 / (sigma tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Microscopic {
    /// Transition cross-section in cm^2.
    pub cross_section: f64,
    /// Excited-state lifetime in s.
    pub lifetime: f64,
    /// Absorber density in cm^-3.
    pub density: f64,
}

impl Microscopic {
    pub fn absorption(&self) -> f64 {
        self.density * self.cross_section
    }

    /// Saturation photon flux `1 / (sigma tau)` in photons cm^-2 s^-1.
    pub fn saturation_flux(&self) -> f64 {
        1.0 / (self.cross_section * self.lifetime)
    }

    fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("cross_section", self.cross_section),
            ("lifetime", self.lifetime),
            ("density", self.density),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(field, "must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// Saturation irradiance `(h c / lambda) / (sigma tau)` in W cm^-2.
pub fn saturation_irradiance(cross_section: f64, lifetime: f64, wavelength_nm: f64) -> f64 {
    photon_energy(wavelength_nm) / (cross_section * lifetime)
}

/// Physical description of the sample.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleSpec {
    absorption: f64,
    length: f64,
    saturation: Intensity,
    microscopic: Option<Microscopic>,
}

impl SampleSpec {
    pub fn new(absorption: f64, length: f64, saturation: Intensity) -> Result<Self> {
        if !(absorption >= 0.0 && absorption.is_finite()) {
            return Err(Error::config("absorption", "must be finite and >= 0"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::config("length", "must be finite and > 0"));
        }
        if !(saturation.value > 0.0 && saturation.value.is_finite()) {
            return Err(Error::config("saturation_intensity", "must be finite and > 0"));
        }
        if !(absorption * length).is_finite() {
            return Err(Error::config("absorption", "optical depth aL is not finite"));
        }
        Ok(SampleSpec {
            absorption,
            length,
            saturation,
            microscopic: None,
        })
    }

    /// Sample with `n_s = 2`, so that the mean photon number equals `kappa`.
    pub fn dimensionless(absorption: f64, length: f64) -> Result<Self> {
        Self::new(absorption, length, Intensity::dimensionless(2.0))
    }

    pub fn from_microscopic(length: f64, micro: Microscopic) -> Result<Self> {
        micro.validate()?;
        let mut s = Self::new(
            micro.absorption(),
            length,
            Intensity::photon_flux(micro.saturation_flux()),
        )?;
        s.microscopic = Some(micro);
        Ok(s)
    }

    /// Builds a sample from whichever description is available. When both a
    /// macroscopic value and the microscopic parameters are given they must
    /// agree to a relative 1e-9; the microscopic values are then kept.
    pub fn reconcile(
        absorption: Option<f64>,
        length: f64,
        saturation: Option<Intensity>,
        microscopic: Option<Microscopic>,
        wavelength_nm: Option<f64>,
    ) -> Result<Self> {
        let Some(micro) = microscopic else {
            let a = absorption.ok_or(Error::config("absorption", "missing"))?;
            let ns = saturation.ok_or(Error::config("saturation_intensity", "missing"))?;
            return Self::new(a, length, ns);
        };
        let sample = Self::from_microscopic(length, micro)?;
        if let Some(a) = absorption {
            if !close(a, sample.absorption) {
                return Err(Error::config(
                    "absorption",
                    alloc::format!("{a} disagrees with n_t sigma = {}", sample.absorption),
                ));
            }
        }
        if let Some(ns) = saturation {
            let given = ns.to_unit(IntensityUnit::PhotonFlux, wavelength_nm)?;
            if !close(given, sample.saturation.value) {
                return Err(Error::config(
                    "saturation_intensity",
                    alloc::format!("{given} disagrees with 1/(sigma tau) = {}", sample.saturation.value),
                ));
            }
        }
        Ok(sample)
    }

    pub fn absorption(&self) -> f64 {
        self.absorption
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn optical_depth(&self) -> f64 {
        self.absorption * self.length
    }

    pub fn saturation_intensity(&self) -> Intensity {
        self.saturation
    }

    pub fn microscopic(&self) -> Option<Microscopic> {
        self.microscopic
    }

    /// Same sample with a different absorption coefficient (length and saturation kept).
    pub fn with_absorption(&self, absorption: f64) -> Result<Self> {
        let mut s = Self::new(absorption, self.length, self.saturation)?;
        s.microscopic = None;
        Ok(s)
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        let mut s = Self::new(self.absorption, length, self.saturation)?;
        s.microscopic = self.microscopic;
        Ok(s)
    }

    /// Mean input photon number (in the units of `n_s`) that corresponds to `kappa`.
    pub fn mean_photons(&self, kappa: f64) -> f64 {
        0.5 * kappa * self.saturation.value
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSISTENCY_TOLERANCE * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ProbeKind {
    Coherent,
    Fock,
    /// Bright amplitude-squeezed light with squeezing `squeezing_db` (R, in dB).
    AmplitudeSqueezed { squeezing_db: f64 },
}

impl ProbeKind {
    /// Input photon-number variance for a state with mean `mean_photons`.
    pub fn input_variance(&self, mean_photons: f64) -> f64 {
        match *self {
            ProbeKind::Coherent => mean_photons,
            ProbeKind::Fock => 0.0,
            ProbeKind::AmplitudeSqueezed { squeezing_db } => {
                mean_photons * libm::pow(10.0, -squeezing_db / 10.0)
            }
        }
    }
}

/// Ratio `n_in / R^2` above which the bright-squeezing approximation is accepted.
pub const BRIGHT_SQUEEZING_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeSpec {
    kind: ProbeKind,
    mean_photons: f64,
    kappa: f64,
    wavelength_nm: Option<f64>,
    bright_regime: bool,
}

impl ProbeSpec {
    /// Probe of `mean_photons` (same units as the sample's `n_s`).
    pub fn new(kind: ProbeKind, mean_photons: f64, sample: &SampleSpec) -> Result<Self> {
        if !(mean_photons > 0.0 && mean_photons.is_finite()) {
            return Err(Error::config("mean_photons", "must be positive and finite"));
        }
        Self::build(kind, mean_photons, 2.0 * mean_photons / sample.saturation.value)
    }

    pub fn from_kappa(kind: ProbeKind, kappa: f64, sample: &SampleSpec) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::config("kappa", "must be positive and finite"));
        }
        Self::build(kind, sample.mean_photons(kappa), kappa)
    }

    fn build(kind: ProbeKind, mean_photons: f64, kappa: f64) -> Result<Self> {
        let bright_regime = match kind {
            ProbeKind::AmplitudeSqueezed { squeezing_db } => {
                if !(squeezing_db >= 0.0) {
                    return Err(Error::config("squeezing_db", "must be >= 0"));
                }
                mean_photons >= BRIGHT_SQUEEZING_FACTOR * squeezing_db * squeezing_db
            }
            _ => true,
        };
        Ok(ProbeSpec {
            kind,
            mean_photons,
            kappa,
            wavelength_nm: None,
            bright_regime,
        })
    }

    pub fn with_wavelength(mut self, wavelength_nm: f64) -> Self {
        self.wavelength_nm = Some(wavelength_nm);
        self
    }

    pub fn kind(&self) -> ProbeKind {
        self.kind
    }

    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn wavelength_nm(&self) -> Option<f64> {
        self.wavelength_nm
    }

    /// False only for squeezed probes too dim for the bright-squeezing formula.
    pub fn bright_regime(&self) -> bool {
        self.bright_regime
    }
}

fn check_kappa(op: &'static str, kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, alloc::format!("kappa must be positive and finite, got {kappa}")))
    }
}

fn check_depth(op: &'static str, optical_depth: f64) -> Result<()> {
    if optical_depth >= 0.0 && optical_depth.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, alloc::format!("optical depth must be finite and >= 0, got {optical_depth}")))
    }
}

/// Sample transmission `eta = W(ln kappa + kappa - aL) / kappa`.
pub fn transmission(kappa: f64, optical_depth: f64) -> Result<f64> {
    check_kappa("transmission", kappa)?;
    check_depth("transmission", optical_depth)?;
    if optical_depth == 0.0 {
        return Ok(1.0);
    }
    let w = wright_omega(libm::log(kappa) + kappa - optical_depth)?;
    Ok((w / kappa).min(1.0))
}

/// `d eta / d a = -L eta / (1 + eta kappa)`.
pub fn transmission_derivative_a(kappa: f64, optical_depth: f64, length: f64) -> Result<f64> {
    let eta = transmission(kappa, optical_depth)?;
    Ok(-length * eta / (1.0 + eta * kappa))
}

/// Relative flux `N(z) / N(0)` at each point of an ascending grid in `[0, length]`.
pub fn intensity_profile(kappa: f64, absorption: f64, length: f64, z_grid: &[f64]) -> Result<Vec<f64>> {
    check_kappa("intensity_profile", kappa)?;
    if !(absorption >= 0.0 && absorption.is_finite()) {
        return Err(Error::domain("intensity_profile", "absorption must be finite and >= 0"));
    }
    let mut prev = f64::NEG_INFINITY;
    z_grid
        .iter()
        .map(|&z| {
            // Grids built as `length * i / n` may overshoot the end by an ulp.
            let z = if z > length && z <= length * (1.0 + 4.0 * f64::EPSILON) { length } else { z };
            if !(0.0..=length).contains(&z) {
                return Err(Error::domain(
                    "intensity_profile",
                    alloc::format!("z = {z} outside [0, {length}]"),
                ));
            }
            if z < prev {
                return Err(Error::domain("intensity_profile", "z grid must be ascending"));
            }
            prev = z;
            transmission(kappa, absorption * z)
        })
        .collect()
}

/// Absorption coefficient reproducing a measured transmission.
///
/// Closed-form inverse of the transmission law: `aL = kappa (1 - eta) - ln eta`.
pub fn infer_absorption(eta: f64, kappa: f64, length: f64) -> Result<f64> {
    check_kappa("infer_absorption", kappa)?;
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::domain("infer_absorption", "length must be positive"));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain("infer_absorption", "transmission must be positive"));
    }
    let optical_depth = kappa * (1.0 - eta) - libm::log(eta);
    if optical_depth < 0.0 {
        return Err(Error::Inconsistent {
            eta,
            kappa,
            implied_optical_depth: optical_depth,
        });
    }
    Ok(optical_depth / length)
}

/// `kappa = 2 I / I_sat` for a probe irradiance `intensity` (W cm^-2).
pub fn intensity_to_kappa(intensity: f64, wavelength_nm: Option<f64>, saturation: Intensity) -> Result<f64> {
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(Error::domain("intensity_to_kappa", "intensity must be positive"));
    }
    let sat = saturation.to_unit(IntensityUnit::Irradiance, wavelength_nm)?;
    Ok(2.0 * intensity / sat)
}

/// Probe irradiance (W cm^-2) for a given `kappa`.
pub fn kappa_to_intensity(kappa: f64, wavelength_nm: Option<f64>, saturation: Intensity) -> Result<f64> {
    check_kappa("kappa_to_intensity", kappa)?;
    let sat = saturation.to_unit(IntensityUnit::Irradiance, wavelength_nm)?;
    Ok(0.5 * kappa * sat)
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;

    /// Bisection for `w + ln w = x`, independent of the library solver.
    fn omega_bisect(x: f64) -> f64 {
        let (mut lo, mut hi) = (1e-300_f64, x.abs().max(10.0) + 10.0);
        for _ in 0..4000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if mid + mid.ln() - x > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn eta_oracle(kappa: f64, depth: f64) -> f64 {
        omega_bisect(kappa.ln() + kappa - depth) / kappa
    }

    #[test]
    fn beer_lambert_half() {
        let eta = transmission(1e-8, core::f64::consts::LN_2).unwrap();
        assert!((eta - 0.5).abs() < 1e-4);
        assert!((eta - (-core::f64::consts::LN_2).exp()).abs() < 1e-7);
    }

    #[test]
    fn transmission_examples() {
        let eta = transmission(2.14, 1.898).unwrap();
        assert!((eta - 0.468).abs() < 5e-4, "{eta}");
        // Oracle: w + ln w = ln 2 + 1 gives w = 1.374822528, eta = 0.687411264.
        let eta = transmission(2.0, 1.0).unwrap();
        assert!((eta - eta_oracle(2.0, 1.0)).abs() < 1e-13);
        assert!((eta - 0.687_411_264_091_811_7).abs() < 1e-12);
        assert_eq!(transmission(3.0, 0.0).unwrap(), 1.0);
        assert!(transmission(0.0, 1.0).is_err());
        assert!(transmission(-1.0, 1.0).is_err());
        assert!(transmission(1.0, -0.1).is_err());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(transmission_derivative_a(1.0, 0.0, 1.0).unwrap(), -0.5);
        let eta = eta_oracle(2.14, 1.898);
        let expected = -0.75 * eta / (1.0 + eta * 2.14);
        let d = transmission_derivative_a(2.14, 1.898, 0.75).unwrap();
        assert!((d - expected).abs() < 1e-12);
        assert!((d + 0.1754).abs() < 5e-4);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &(kappa, a, length) in &[(0.01, 1.0, 1.0), (1.0, 0.3, 2.0), (5.0, 2.0, 0.75), (40.0, 9.0, 1.5)] {
            let h = 1e-6 * a;
            let fd = (transmission(kappa, (a + h) * length).unwrap()
                - transmission(kappa, (a - h) * length).unwrap())
                / (2.0 * h);
            let d = transmission_derivative_a(kappa, a * length, length).unwrap();
            assert!(((d - fd) / d).abs() < 1e-6, "{kappa} {a}: {d} vs {fd}");
        }
    }

    #[test]
    fn profile_endpoints_and_errors() {
        let z: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let p = intensity_profile(2.0, 1.0, 1.0, &z).unwrap();
        assert_eq!(p[0], 1.0);
        assert!((p[10] - transmission(2.0, 1.0).unwrap()).abs() < 1e-15);
        assert!(p.windows(2).all(|w| w[1] <= w[0]));
        let bl = intensity_profile(1e-8, 0.7, 5.0, &[0.0, 1.0, 2.5, 5.0]).unwrap();
        for (v, z) in bl.iter().zip([0.0f64, 1.0, 2.5, 5.0]) {
            assert!((v - (-0.7 * z).exp()).abs() < 1e-6);
        }
        assert!(intensity_profile(1.0, 1.0, 1.0, &[0.0, 1.5]).is_err());
        assert!(intensity_profile(1.0, 1.0, 1.0, &[-0.1]).is_err());
        assert!(intensity_profile(1.0, 1.0, 1.0, &[0.5, 0.2]).is_err());
    }

    #[test]
    fn inference_examples() {
        let a = infer_absorption(0.17, 0.005, 7.5).unwrap();
        assert!((a - 0.236_814_245_590_916_7).abs() < 1e-12, "{a}");
        let a = infer_absorption(0.5, 0.02, 1.0).unwrap();
        assert!((a - 0.703_147_180_559_945_3).abs() < 1e-12, "{a}");
        assert_eq!(infer_absorption(1.0, 3.0, 2.0).unwrap(), 0.0);
        assert!(matches!(infer_absorption(1.2, 1.0, 1.0), Err(Error::Inconsistent { .. })));
        assert!(infer_absorption(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn inference_round_trip_with_root_finding() {
        // Cross-check the closed form against bisection on the forward model.
        let (eta, kappa, length) = (0.17, 0.005, 7.5);
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if transmission(kappa, mid * length).unwrap() > eta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = infer_absorption(eta, kappa, length).unwrap();
        assert!((a - lo).abs() < 1e-12);
        let back = transmission(kappa, a * length).unwrap();
        assert!(((back - eta) / eta).abs() < 1e-12);
    }

    #[test]
    fn unit_conversion() {
        let k = intensity_to_kappa(7e-6, None, Intensity::irradiance(2.5e-3)).unwrap();
        assert!((k - 0.0056).abs() < 1e-15);
        let k = intensity_to_kappa(1.25e-3, None, Intensity::irradiance(2.5e-3)).unwrap();
        assert_eq!(k, 1.0);
        let isat = saturation_irradiance(4e-17, 4e-9, 661.0);
        // (6.62607015e-34 * 2.99792458e8 / 661e-9) / (1.6e-25)
        assert!((isat - 1_878_258.185_655_189).abs() < 1e-6 * 1.88e6, "{isat}");
        let flux = Intensity::photon_flux(1.0 / (4e-17 * 4e-9));
        let k = intensity_to_kappa(isat / 2.0, Some(661.0), flux).unwrap();
        assert!((k - 1.0).abs() < 1e-12);
        assert!(matches!(
            intensity_to_kappa(1.0, None, flux),
            Err(Error::UnitMismatch(_))
        ));
        let i = kappa_to_intensity(k, Some(661.0), flux).unwrap();
        assert!(((i - isat / 2.0) / i).abs() < 1e-12);
    }

    #[test]
    fn microscopic_reconciliation() {
        let micro = Microscopic {
            cross_section: 4e-17,
            lifetime: 4e-9,
            density: 1e16,
        };
        let s = SampleSpec::reconcile(None, 1.0, None, Some(micro), None).unwrap();
        assert!((s.absorption() - 0.4).abs() < 1e-15);
        assert!((s.saturation_intensity().value - 6.25e24).abs() < 1e10);
        let ok = SampleSpec::reconcile(Some(0.4), 1.0, None, Some(micro), None);
        assert!(ok.is_ok());
        let bad = SampleSpec::reconcile(Some(0.41), 1.0, None, Some(micro), None);
        assert!(matches!(bad, Err(Error::Config { field: "absorption", .. })));
        let isat = Intensity::irradiance(saturation_irradiance(4e-17, 4e-9, 661.0));
        assert!(SampleSpec::reconcile(None, 1.0, Some(isat), Some(micro), Some(661.0)).is_ok());
        assert!(SampleSpec::reconcile(None, 1.0, Some(isat), Some(micro), None).is_err());
    }

    #[test]
    fn probe_kappa_is_derived() {
        let s = SampleSpec::new(1.0, 1.0, Intensity::irradiance(2.5e-3)).unwrap();
        let p = ProbeSpec::new(ProbeKind::Coherent, 2.67e-3, &s).unwrap();
        assert!((p.kappa() - 2.136).abs() < 1e-12);
        let p = ProbeSpec::from_kappa(ProbeKind::Fock, 2.0, &s).unwrap();
        assert!((p.mean_photons() - 2.5e-3).abs() < 1e-18);
        let dim = SampleSpec::dimensionless(1.0, 1.0).unwrap();
        let sq = ProbeSpec::from_kappa(ProbeKind::AmplitudeSqueezed { squeezing_db: 15.0 }, 10.0, &dim).unwrap();
        assert!(!sq.bright_regime());
        let sq = ProbeSpec::from_kappa(ProbeKind::AmplitudeSqueezed { squeezing_db: 15.0 }, 1e6, &dim).unwrap();
        assert!(sq.bright_regime());
    }
}
