use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satprec_core::lindblad::{propagate_sample, QuantumSimConfig, SliceTrace};
use satprec_core::optimize::{
    equal_precision_fock_kappa_detected, numerical_optimal_kappa, optimal_kappa, optimal_length,
    run_chlorophyll_scenario, run_dbt_scenario, ChlorophyllConfig, DbtConfig, OptimalKappa, OptimizationResult,
};
use satprec_core::{
    fisher_coherent, fisher_fock, fisher_squeezed, qfi_bound, quantum_advantage, transmission, wright_omega,
    DetectorConvention, Error, Information, SampleSpec,
};

use crate::output::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>, Error> {
        let ok = self.points >= 1
            && self.min.is_finite()
            && self.max.is_finite()
            && self.max >= self.min
            && (self.spacing == Spacing::Linear || self.min > 0.0);
        if !ok {
            return Err(Error::config("grid", "need points >= 1, finite min <= max, and min > 0 for log spacing"));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let n = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                let t = i as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect())
    }
}

fn info(i: Information) -> f64 {
    i.to_f64()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionConfig {
    pub absorption: f64,
    pub length: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Explicit z grid; overrides `points`.
    #[serde(default)]
    pub z_grid: Option<Vec<f64>>,
    pub kappas: Vec<f64>,
}

fn default_points() -> usize {
    101
}

/// Transmission `N(z)/n_in` against depth. `kappa = 0` rows are the Beer-Lambert law.
pub fn transmission_table(cfg: &TransmissionConfig) -> Result<Table, Error> {
    if !(cfg.length > 0.0 && cfg.length.is_finite()) {
        return Err(Error::config("length", "must be positive"));
    }
    if !(cfg.absorption >= 0.0 && cfg.absorption.is_finite()) {
        return Err(Error::config("absorption", "must be finite and >= 0"));
    }
    let z = match &cfg.z_grid {
        Some(z) => z.clone(),
        None => Grid {
            min: 0.0,
            max: cfg.length,
            points: cfg.points,
            spacing: Spacing::Linear,
        }
        .values()?,
    };
    let mut kappas = cfg.kappas.clone();
    if !kappas.contains(&0.0) {
        kappas.insert(0, 0.0);
    }
    let mut t = Table::new(&["z", "kappa", "eta"]);
    for &k in &kappas {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::config("kappas", "entries must be finite and >= 0"));
        }
        let eta = if k == 0.0 {
            if let Some(&bad) = z.iter().find(|&&z| !(0.0..=cfg.length).contains(&z)) {
                return Err(Error::config("z_grid", format!("z = {bad} outside [0, length]")));
            }
            z.iter().map(|&z| (-cfg.absorption * z).exp()).collect()
        } else {
            satprec_core::intensity_profile(k, cfg.absorption, cfg.length, &z)?
        };
        for (&z, e) in z.iter().zip(eta) {
            t.push(vec![z, k, e]);
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FisherSweepConfig {
    pub length: f64,
    pub absorptions: Vec<f64>,
    pub kappa: Grid,
}

/// Coherent FI, quantum bound and their per-photon values (`n_in = kappa` for `n_s = 2`).
pub fn fisher_sweep_table(cfg: &FisherSweepConfig) -> Result<Table, Error> {
    let kappas = cfg.kappa.values()?;
    let mut t = Table::new(&["kappa", "a", "F_coherent", "F_per_photon_coherent", "Q", "Q_per_photon", "advantage"]);
    for &a in &cfg.absorptions {
        let s = SampleSpec::dimensionless(a, cfg.length)?;
        for &k in &kappas {
            let n_in = s.mean_photons(k);
            let fc = fisher_coherent(&s, k)?;
            let q = info(qfi_bound(&s, k)?);
            t.push(vec![k, a, fc, fc / n_in, q, q / n_in, info(quantum_advantage(&s, k)?)]);
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerReductionConfig {
    pub length: f64,
    pub absorptions: Vec<f64>,
    pub kappa_c: Grid,
    #[serde(default)]
    pub detector_efficiency: Option<f64>,
    #[serde(default)]
    pub detector_convention: DetectorConvention,
}

pub fn power_reduction_table(cfg: &PowerReductionConfig) -> Result<Table, Error> {
    let kc = cfg.kappa_c.values()?;
    let gamma = cfg.detector_efficiency.unwrap_or(1.0);
    let mut t = Table::new(&["kappa_c", "a", "kappa_q", "reduction_db"]);
    for &a in &cfg.absorptions {
        let s = SampleSpec::dimensionless(a, cfg.length)?;
        for &k in &kc {
            let r = equal_precision_fock_kappa_detected(k, &s, gamma, cfg.detector_convention)?;
            t.push(vec![k, a, r.kappa_fock, r.reduction_db]);
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezedConfig {
    pub length: f64,
    pub absorption: f64,
    pub kappa: Grid,
    pub squeezing_db: Vec<f64>,
}

pub fn squeezed_table(cfg: &SqueezedConfig) -> Result<Table, Error> {
    let s = SampleSpec::dimensionless(cfg.absorption, cfg.length)?;
    let kappas = cfg.kappa.values()?;
    let mut t = Table::new(&["kappa", "R", "Fs_over_Q"]);
    for &r in &cfg.squeezing_db {
        for &k in &kappas {
            let q = info(qfi_bound(&s, k)?);
            t.push(vec![k, r, fisher_squeezed(&s, k, r)? / q]);
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaOptimization {
    pub optical_depths: Vec<f64>,
    #[serde(default = "default_kappa_bracket")]
    pub bracket: (f64, f64),
}

fn default_kappa_bracket() -> (f64, f64) {
    (1e-3, 1e3)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthOptimization {
    pub absorption: f64,
    pub kappa: f64,
    pub bracket: (f64, f64),
    pub baseline_length: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default)]
    pub kappa: Option<KappaOptimization>,
    #[serde(default)]
    pub length: Option<LengthOptimization>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaOptimum {
    pub optical_depth: f64,
    pub closed_form: OptimalKappa,
    pub numerical_kappa: f64,
    pub relative_difference: f64,
    pub fisher_at_optimum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    pub kappa: Vec<KappaOptimum>,
    pub length: Option<OptimizationResult>,
}

pub fn optimize_report(cfg: &OptimizeConfig) -> Result<OptimizeReport, Error> {
    if cfg.kappa.is_none() && cfg.length.is_none() {
        return Err(Error::config("kappa", "give a [kappa] and/or [length] section"));
    }
    let mut kappa = Vec::new();
    if let Some(k) = &cfg.kappa {
        for &ad in &k.optical_depths {
            let closed_form = optimal_kappa(ad)?;
            let s = SampleSpec::dimensionless(ad, 1.0)?;
            let numerical_kappa = numerical_optimal_kappa(&s, k.bracket)?.argmax;
            kappa.push(KappaOptimum {
                optical_depth: ad,
                closed_form,
                numerical_kappa,
                relative_difference: (numerical_kappa - closed_form.kappa).abs() / closed_form.kappa,
                fisher_at_optimum: fisher_coherent(&s, closed_form.kappa)?,
            });
        }
    }
    let length = cfg
        .length
        .as_ref()
        .map(|l| optimal_length(l.absorption, l.kappa, l.bracket, l.baseline_length))
        .transpose()?;
    Ok(OptimizeReport { kappa, length })
}

pub fn dbt_report(cfg: &DbtConfig) -> Result<satprec_core::optimize::DbtReport, Error> {
    run_dbt_scenario(cfg)
}

pub fn chlorophyll_report(cfg: &ChlorophyllConfig) -> Result<satprec_core::optimize::ChlorophyllReport, Error> {
    run_chlorophyll_scenario(cfg)
}

pub fn simulate(cfg: &QuantumSimConfig) -> Result<(SliceTrace, SimulationSummary), Error> {
    let trace = propagate_sample(cfg)?;
    let summary = SimulationSummary::new(cfg, &trace);
    Ok((trace, summary))
}

pub fn slice_table(trace: &SliceTrace) -> Table {
    let mut t = Table::new(&["slice", "mean_n", "var_n", "fano_std", "fano_paper", "eta", "var_semiclassical"]);
    for s in &trace.slices {
        t.push(vec![
            s.index as f64,
            s.mean_n,
            s.var_n,
            s.fano_std.unwrap_or(f64::NAN),
            s.fano_paper.unwrap_or(f64::INFINITY),
            s.eta_cumulative,
            s.var_semiclassical,
        ]);
    }
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub config: QuantumSimConfig,
    pub na_crossing_index: Option<usize>,
    pub input_mean: f64,
    pub input_variance: f64,
    pub truncation_deficit: f64,
    pub max_fano_std: Option<f64>,
    pub max_trace_drift: f64,
    pub min_eigenvalue: Option<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl SimulationSummary {
    fn new(cfg: &QuantumSimConfig, t: &SliceTrace) -> Self {
        let diags: Vec<_> = t.slices.iter().filter_map(|s| s.diagnostics).collect();
        SimulationSummary {
            config: cfg.clone(),
            na_crossing_index: t.na_crossing_index,
            input_mean: t.input_mean,
            input_variance: t.input_variance,
            truncation_deficit: t.truncation_deficit,
            max_fano_std: t.max_fano_std(),
            max_trace_drift: diags.iter().map(|d| d.trace_drift).fold(0.0, f64::max),
            min_eigenvalue: diags.iter().filter_map(|d| d.min_eigenvalue).reduce(f64::min),
            accepted_steps: diags.iter().map(|d| d.steps.accepted).sum(),
            rejected_steps: diags.iter().map(|d| d.steps.rejected).sum(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub samples: usize,
    pub kappa_range: (f64, f64),
    pub optical_depth_range: (f64, f64),
}

/// Randomized identity checks, drawn log-uniformly from the configured ranges.
pub fn verify_table(cfg: &VerifyConfig, seed: u64) -> Result<Table, Error> {
    let (k0, k1) = cfg.kappa_range;
    let (d0, d1) = cfg.optical_depth_range;
    if !(k0 > 0.0 && k1 >= k0 && d0 > 0.0 && d1 >= d0 && cfg.samples > 0) {
        return Err(Error::config("kappa_range", "ranges must be positive and ordered, samples > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log_uniform = |lo: f64, hi: f64| (lo.ln() + (hi.ln() - lo.ln()) * rng.gen::<f64>()).exp();
    let mut worst = [0.0f64; 4];
    for _ in 0..cfg.samples {
        let k = log_uniform(k0, k1);
        let ad = log_uniform(d0, d1);
        let s = SampleSpec::dimensionless(ad, 1.0)?;
        let eta = transmission(k, ad)?;
        let w = wright_omega(k.ln() + k - ad)?;
        worst[0] = worst[0].max((w + w.ln() - (k.ln() + k - ad)).abs() / (k.ln() + k - ad).abs().max(1.0));
        let q = info(qfi_bound(&s, k)?);
        let ff = info(fisher_fock(&s, k)?);
        worst[1] = worst[1].max((ff - q).abs() / q);
        let adv = info(quantum_advantage(&s, k)?);
        worst[2] = worst[2].max((q / fisher_coherent(&s, k)? - adv).abs() / adv);
        let back = satprec_core::infer_absorption(eta, k, 1.0)?;
        worst[3] = worst[3].max((back - ad).abs() / ad.max(1.0));
    }
    let mut t = Table::new(&["check", "max_error", "tolerance", "pass"]);
    for (i, (&e, tol)) in worst.iter().zip([1e-12, 1e-12, 1e-12, 1e-8]).enumerate() {
        t.push(vec![i as f64, e, tol, if e <= tol { 1.0 } else { 0.0 }]);
    }
    Ok(t)
}
