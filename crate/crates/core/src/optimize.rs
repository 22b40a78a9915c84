//! Optimal probe power, optimal sample length and equal-precision power
//! reduction, plus the two worked measurement scenarios.

use alloc::vec::Vec;

use crate::fisher::{
    fisher_coherent, fisher_detected, precision_report, DetectorConvention, Information, PrecisionReport,
};
use crate::model::{
    infer_absorption, intensity_to_kappa, kappa_to_intensity, saturation_irradiance, transmission, Intensity,
    Microscopic, ProbeKind, ProbeSpec, SampleSpec,
};
use crate::search::{brent_root, maximize_positive, Maximum};
use crate::special_fn::wright_omega;
use crate::{decibels, Error, Result};

/// Relative tolerance on the argument of every golden-section search.
pub const ARGMAX_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OptimizationResult {
    pub argmax: f64,
    pub objective_at_opt: f64,
    pub baseline: f64,
    pub baseline_objective: f64,
    pub improvement_db: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

impl OptimizationResult {
    fn from_maximum(m: Maximum, baseline: f64, baseline_objective: f64) -> Self {
        OptimizationResult {
            argmax: m.argmax,
            objective_at_opt: m.value,
            baseline,
            baseline_objective,
            improvement_db: decibels(m.value / baseline_objective),
            bracket: m.bracket,
            iterations: m.iterations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OptimalKappa {
    pub kappa: f64,
    pub eta: f64,
}

/// Probe strength maximizing the coherent-state FI: `kappa = W(1 + aL)`,
/// with transmission `1 / kappa` at the optimum.
pub fn optimal_kappa(optical_depth: f64) -> Result<OptimalKappa> {
    if !(optical_depth >= 0.0 && optical_depth.is_finite()) {
        return Err(Error::domain("optimal_kappa", "optical depth must be finite and >= 0"));
    }
    let kappa = wright_omega(1.0 + optical_depth)?;
    Ok(OptimalKappa { kappa, eta: 1.0 / kappa })
}

/// Golden-section maximization of the coherent FI over `kappa`.
pub fn numerical_optimal_kappa(sample: &SampleSpec, bracket: (f64, f64)) -> Result<Maximum> {
    maximize_positive(|k| fisher_coherent(sample, k), bracket.0, bracket.1, 1e-11)
}

/// Sample length maximizing the coherent FI with the input-face strength
/// `kappa_in` held fixed. `baseline_length` is the reference for `improvement_db`.
pub fn optimal_length(
    absorption: f64,
    kappa_in: f64,
    bracket: (f64, f64),
    baseline_length: f64,
) -> Result<OptimizationResult> {
    if !(absorption > 0.0 && absorption.is_finite()) {
        return Err(Error::domain("optimal_length", "absorption must be positive"));
    }
    if !(kappa_in > 0.0 && kappa_in.is_finite()) {
        return Err(Error::domain("optimal_length", "kappa must be positive"));
    }
    let objective = |length: f64| fisher_coherent(&SampleSpec::dimensionless(absorption, length)?, kappa_in);
    let m = maximize_positive(objective, bracket.0, bracket.1, ARGMAX_TOLERANCE)?;
    let base = objective(baseline_length)?;
    Ok(OptimizationResult::from_maximum(m, baseline_length, base))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PowerReduction {
    pub kappa_coherent: f64,
    pub kappa_fock: f64,
    /// `10 log10(kappa_fock / kappa_coherent)`, negative.
    pub reduction_db: f64,
    /// `|F_fock(kappa_fock) - F_c(kappa_coherent)| / F_c(kappa_coherent)`.
    pub residual: f64,
}

/// Fock-probe strength giving the same precision as a coherent probe at `kappa_c`.
pub fn equal_precision_fock_kappa(kappa_c: f64, sample: &SampleSpec) -> Result<PowerReduction> {
    equal_precision_fock_kappa_detected(kappa_c, sample, 1.0, DetectorConvention::default())
}

/// As [`equal_precision_fock_kappa`], with a detector of efficiency `gamma`.
pub fn equal_precision_fock_kappa_detected(
    kappa_c: f64,
    sample: &SampleSpec,
    gamma: f64,
    convention: DetectorConvention,
) -> Result<PowerReduction> {
    if !(kappa_c > 0.0 && kappa_c.is_finite()) {
        return Err(Error::domain("equal_precision_fock_kappa", "kappa must be positive"));
    }
    if sample.optical_depth() <= 0.0 {
        return Err(Error::domain("equal_precision_fock_kappa", "lossless sample has unbounded Fock FI"));
    }
    let finite = |i: Information| {
        i.finite()
            .ok_or_else(|| Error::Invariant("unbounded FI at a lossy operating point".into()))
    };
    let target = finite(fisher_detected(sample, kappa_c, ProbeKind::Coherent, gamma, convention)?)?;
    let fock = |k: f64| -> Result<f64> { finite(fisher_detected(sample, k, ProbeKind::Fock, gamma, convention)?) };

    // Keep to the rising flank of F_fock so the smallest equal-precision strength is found.
    let mut hi = kappa_c;
    let peak = maximize_positive(fock, 1e-6 * kappa_c, kappa_c, 1e-10);
    if let Ok(p) = peak {
        if p.argmax < kappa_c {
            hi = p.argmax;
        }
    }
    if fock(hi)? < target {
        return Err(Error::NoRoot {
            lo: 0.0,
            hi,
            f_lo: -target,
            f_hi: fock(hi)? - target,
        });
    }
    let mut lo = 1e-3 * hi;
    while fock(lo)? > target {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(Error::Invariant("no lower bracket for equal-precision search".into()));
        }
    }
    let kappa_fock = brent_root(|k| Ok(fock(k)? - target), lo, hi, 1e-15 * hi, 500)?;
    let residual = ((fock(kappa_fock)? - target) / target).abs();
    Ok(PowerReduction {
        kappa_coherent: kappa_c,
        kappa_fock,
        reduction_db: decibels(kappa_fock / kappa_c),
        residual,
    })
}

/// Doppler-broadening thermometry style scenario: a probe of known strength,
/// a measured transmission and/or a stated absorption coefficient.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DbtConfig {
    /// Saturation intensity `n_s` in W cm^-2.
    pub saturation_intensity: f64,
    /// Probe irradiance in W cm^-2; used when `kappa` is not given.
    #[cfg_attr(feature = "serde", serde(default))]
    pub probe_intensity: Option<f64>,
    /// Operating probe strength; takes precedence over `probe_intensity`.
    #[cfg_attr(feature = "serde", serde(default))]
    pub kappa: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub wavelength_nm: Option<f64>,
    /// Cell length in cm.
    pub length: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub eta_measured: Option<f64>,
    /// Stated absorption coefficient in cm^-1, analysed alongside any inferred one.
    #[cfg_attr(feature = "serde", serde(default))]
    pub absorption: Option<f64>,
    /// Stated optical depth `aL`, analysed alongside any inferred one.
    #[cfg_attr(feature = "serde", serde(default))]
    pub optical_depth: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub detector_efficiency: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub detector_convention: DetectorConvention,
    /// Multiple of the optimal probe strength used to show the cost of over-driving.
    #[cfg_attr(feature = "serde", serde(default = "default_power_step"))]
    pub power_step_factor: f64,
}

#[cfg(feature = "serde")]
fn default_power_step() -> f64 {
    4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AbsorptionSource {
    Inferred,
    Stated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DetectorComparison {
    pub detector_efficiency: f64,
    pub convention: DetectorConvention,
    pub reduction: PowerReduction,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DbtAnalysis {
    pub source: AbsorptionSource,
    pub absorption: f64,
    pub optical_depth: f64,
    pub eta_operating: f64,
    pub optimum: OptimalKappa,
    /// Optimal probe irradiance in W cm^-2.
    pub optimal_intensity: f64,
    pub improvement_db: f64,
    pub power_step_kappa: f64,
    pub power_step_db: f64,
    pub power_step_precision_db: f64,
    pub operating: PrecisionReport,
    pub optimal: PrecisionReport,
    pub detector: Option<DetectorComparison>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DbtReport {
    pub kappa_operating: f64,
    pub kappa_from_intensity: Option<f64>,
    pub analyses: Vec<DbtAnalysis>,
}

pub fn run_dbt_scenario(config: &DbtConfig) -> Result<DbtReport> {
    let saturation = Intensity::irradiance(config.saturation_intensity);
    let kappa_from_intensity = config
        .probe_intensity
        .map(|i| intensity_to_kappa(i, config.wavelength_nm, saturation))
        .transpose()?;
    let kappa = config
        .kappa
        .or(kappa_from_intensity)
        .ok_or(Error::config("kappa", "give kappa or probe_intensity"))?;

    let mut sources = Vec::new();
    if let Some(eta) = config.eta_measured {
        sources.push((AbsorptionSource::Inferred, infer_absorption(eta, kappa, config.length)?));
    }
    if let Some(a) = config.absorption {
        sources.push((AbsorptionSource::Stated, a));
    }
    if let Some(ad) = config.optical_depth {
        sources.push((AbsorptionSource::Stated, ad / config.length));
    }
    if sources.is_empty() {
        return Err(Error::config("eta_measured", "give eta_measured, absorption or optical_depth"));
    }
    if !(config.power_step_factor > 0.0 && config.power_step_factor.is_finite()) {
        return Err(Error::config("power_step_factor", "must be positive"));
    }

    let analyses = sources
        .into_iter()
        .map(|(source, absorption)| dbt_analysis(config, saturation, kappa, source, absorption))
        .collect::<Result<Vec<_>>>()?;
    Ok(DbtReport {
        kappa_operating: kappa,
        kappa_from_intensity,
        analyses,
    })
}

fn dbt_analysis(
    config: &DbtConfig,
    saturation: Intensity,
    kappa: f64,
    source: AbsorptionSource,
    absorption: f64,
) -> Result<DbtAnalysis> {
    let sample = SampleSpec::new(absorption, config.length, saturation)?;
    let optical_depth = sample.optical_depth();
    let optimum = optimal_kappa(optical_depth)?;
    let f_operating = fisher_coherent(&sample, kappa)?;
    let f_optimal = fisher_coherent(&sample, optimum.kappa)?;
    let step_kappa = optimum.kappa * config.power_step_factor;
    let f_step = fisher_coherent(&sample, step_kappa)?;

    let report = |k: f64| {
        let probe = ProbeSpec::from_kappa(ProbeKind::Coherent, k, &sample)?;
        let probe = match config.wavelength_nm {
            Some(l) => probe.with_wavelength(l),
            None => probe,
        };
        precision_report(&sample, &probe, 1.0, config.detector_convention)
    };

    let detector = config
        .detector_efficiency
        .map(|gamma| -> Result<DetectorComparison> {
            Ok(DetectorComparison {
                detector_efficiency: gamma,
                convention: config.detector_convention,
                reduction: equal_precision_fock_kappa_detected(
                    optimum.kappa,
                    &sample,
                    gamma,
                    config.detector_convention,
                )?,
            })
        })
        .transpose()?;

    Ok(DbtAnalysis {
        source,
        absorption,
        optical_depth,
        eta_operating: transmission(kappa, optical_depth)?,
        optimum,
        optimal_intensity: kappa_to_intensity(optimum.kappa, config.wavelength_nm, saturation)?,
        improvement_db: decibels(f_optimal / f_operating),
        power_step_kappa: step_kappa,
        power_step_db: decibels(config.power_step_factor),
        power_step_precision_db: decibels(f_step / f_optimal),
        operating: report(kappa)?,
        optimal: report(optimum.kappa)?,
        detector,
    })
}

/// Solution-phase absorber measured at a fixed cuvette length.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChlorophyllConfig {
    /// Cross-section in cm^2.
    pub cross_section: f64,
    /// Excited-state lifetime in s.
    pub lifetime: f64,
    pub wavelength_nm: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub kappa: Option<f64>,
    /// Probe power in W; with `beam_area` gives the irradiance when `kappa` is absent.
    #[cfg_attr(feature = "serde", serde(default))]
    pub probe_power: Option<f64>,
    /// Beam area in cm^2.
    #[cfg_attr(feature = "serde", serde(default))]
    pub beam_area: Option<f64>,
    pub eta_measured: f64,
    /// Cuvette length in cm.
    pub length: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_length_bracket"))]
    pub length_bracket: (f64, f64),
}

#[cfg(feature = "serde")]
fn default_length_bracket() -> (f64, f64) {
    (0.1, 20.0)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChlorophyllReport {
    /// Saturation irradiance in W cm^-2.
    pub saturation_irradiance: f64,
    pub kappa: f64,
    pub absorption: f64,
    /// Absorber density `a / sigma` in cm^-3.
    pub density: f64,
    pub length_optimum: OptimizationResult,
    pub eta_at_optimum: f64,
    pub baseline: PrecisionReport,
    pub optimal: PrecisionReport,
}

pub fn run_chlorophyll_scenario(config: &ChlorophyllConfig) -> Result<ChlorophyllReport> {
    let isat = saturation_irradiance(config.cross_section, config.lifetime, config.wavelength_nm);
    if !(isat > 0.0 && isat.is_finite()) {
        return Err(Error::config("cross_section", "saturation intensity is not finite"));
    }
    let saturation = Intensity::irradiance(isat);
    let kappa = match (config.kappa, config.probe_power, config.beam_area) {
        (Some(k), _, _) => k,
        (None, Some(p), Some(area)) => intensity_to_kappa(p / area, Some(config.wavelength_nm), saturation)?,
        _ => return Err(Error::config("kappa", "give kappa or probe_power with beam_area")),
    };
    let absorption = infer_absorption(config.eta_measured, kappa, config.length)?;
    let length_optimum = optimal_length(absorption, kappa, config.length_bracket, config.length)?;

    let micro = Microscopic {
        cross_section: config.cross_section,
        lifetime: config.lifetime,
        density: absorption / config.cross_section,
    };
    let report = |length: f64| {
        let sample = SampleSpec::reconcile(
            Some(absorption),
            length,
            Some(saturation),
            Some(micro),
            Some(config.wavelength_nm),
        )?;
        let probe = ProbeSpec::from_kappa(ProbeKind::Coherent, kappa, &sample)?.with_wavelength(config.wavelength_nm);
        precision_report(&sample, &probe, 1.0, DetectorConvention::default())
    };
    Ok(ChlorophyllReport {
        saturation_irradiance: isat,
        kappa,
        absorption,
        density: micro.density,
        eta_at_optimum: transmission(kappa, absorption * length_optimum.argmax)?,
        baseline: report(config.length)?,
        optimal: report(length_optimum.argmax)?,
        length_optimum,
    })
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::fisher::{fisher_fock, qfi_bound};

    #[test]
    fn optimal_kappa_examples() {
        let o = optimal_kappa(0.0).unwrap();
        assert_eq!(o.kappa, 1.0);
        assert_eq!(o.eta, 1.0);
        let o = optimal_kappa(1.898).unwrap();
        assert!((o.kappa - 2.14).abs() < 0.01, "{o:?}");
        assert!((o.eta - 0.467).abs() < 0.005);
        assert!(optimal_kappa(-1.0).is_err());
    }

    #[test]
    fn closed_form_matches_golden_section() {
        let s = SampleSpec::dimensionless(1.9, 1.0).unwrap();
        let m = numerical_optimal_kappa(&s, (0.01, 100.0)).unwrap();
        let o = optimal_kappa(1.9).unwrap();
        assert!(((m.argmax - o.kappa) / o.kappa).abs() < 1e-6, "{} vs {}", m.argmax, o.kappa);
    }

    #[test]
    fn length_optimum_small_kappa_limit() {
        // L^2 e^{-aL} peaks at 2/a.
        for a in [0.5, 1.0, 2.0] {
            let r = optimal_length(a, 1e-9, (0.1, 10.0), 1.0).unwrap();
            assert!((r.argmax - 2.0 / a).abs() < 1e-6 * 2.0 / a, "{a}: {}", r.argmax);
            assert!(r.objective_at_opt >= r.baseline_objective);
        }
    }

    #[test]
    fn length_bracket_error() {
        // Zero absorption: FI grows with L without bound.
        assert!(optimal_length(0.0, 1.0, (0.1, 1.0), 1.0).is_err());
    }

    #[test]
    fn power_reduction_weak_absorber() {
        let s = SampleSpec::dimensionless(1e-4, 1.0).unwrap();
        let r = equal_precision_fock_kappa(1.0, &s).unwrap();
        assert!(r.residual <= 1e-9, "{r:?}");
        assert!(r.kappa_fock < 1.0);
        let fc = fisher_coherent(&s, 1.0).unwrap();
        let ff = fisher_fock(&s, r.kappa_fock).unwrap().finite().unwrap();
        assert!(((ff - fc) / fc).abs() <= 1e-9);
        let q = qfi_bound(&s, r.kappa_fock).unwrap().finite().unwrap();
        assert!(((q - ff) / ff).abs() < 1e-12);
    }

    #[test]
    fn dbt_detector_power_reduction_near_three_db() {
        let s = SampleSpec::dimensionless(1.898 / 0.75, 0.75).unwrap();
        let k = optimal_kappa(1.898).unwrap().kappa;
        for conv in [DetectorConvention::Printed, DetectorConvention::Propagated] {
            let r = equal_precision_fock_kappa_detected(k, &s, 0.85, conv).unwrap();
            assert!((-4.0..=-2.5).contains(&r.reduction_db), "{conv:?}: {r:?}");
        }
    }

    #[test]
    fn dbt_scenario_numbers() {
        let cfg = DbtConfig {
            saturation_intensity: 2.5e-3,
            probe_intensity: Some(7e-6),
            kappa: Some(0.005),
            wavelength_nm: Some(895.0),
            length: 7.5,
            eta_measured: Some(0.17),
            absorption: None,
            optical_depth: Some(1.898),
            detector_efficiency: Some(0.85),
            detector_convention: DetectorConvention::Printed,
            power_step_factor: 4.0,
        };
        let r = run_dbt_scenario(&cfg).unwrap();
        assert!((r.kappa_from_intensity.unwrap() - 0.0056).abs() < 1e-12);
        let inferred = &r.analyses[0];
        // Derived: aL = 1.776107, kappa_opt = 2.055559, 24.6926 dB, -3.4279 dB at 4 kappa_opt.
        assert!((inferred.optical_depth - 1.776_106_841_931_875).abs() < 1e-12);
        assert!((inferred.improvement_db - 24.692_590_7).abs() < 1e-5, "{}", inferred.improvement_db);
        assert!((inferred.power_step_precision_db + 3.427_914_2).abs() < 1e-5);
        let stated = &r.analyses[1];
        assert!((stated.optical_depth - 1.898).abs() < 1e-12);
        assert!((stated.optimum.kappa - 2.14).abs() < 0.01);
        assert!((-4.0..=-2.5).contains(&stated.power_step_precision_db));
        assert!((stated.optimal_intensity - 2.67e-3).abs() < 1e-5);
    }

    #[test]
    fn chlorophyll_scenario_numbers() {
        let cfg = ChlorophyllConfig {
            cross_section: 4e-17,
            lifetime: 4e-9,
            wavelength_nm: 661.0,
            kappa: Some(0.02),
            probe_power: None,
            beam_area: None,
            eta_measured: 0.5,
            length: 1.0,
            length_bracket: (0.1, 20.0),
        };
        let r = run_chlorophyll_scenario(&cfg).unwrap();
        assert!((r.absorption - 0.703_147_180_559_945_3).abs() < 1e-12);
        // Frozen from an independent bounded scalar optimizer: L = 2.86755, 3.5418 dB.
        assert!((r.length_optimum.argmax - 2.867_546).abs() < 1e-4, "{:?}", r.length_optimum);
        assert!((r.length_optimum.improvement_db - 3.541_79).abs() < 1e-3);
        assert!((r.saturation_irradiance - 1.878_258e6).abs() < 1.0);
    }
}
