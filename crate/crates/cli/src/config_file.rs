//! JSON run configuration.
//!
//! Dimensionful fields are strings with explicit unit suffixes; bare numbers
//! are rejected at the type level. A measurement section specifies either
//! the projection timescale `tau` directly or the physical quadruple
//! (`chi_over_kappa`, `nbar`, `kappa`, implicit `eta_m`). Rabi drive is a
//! cyclic frequency (Ω = 2π·f). An optional `gamma` rate pins the residual
//! dephasing directly, back-solving T2*.

use serde::Deserialize;

use qtraj_core::bloch::BlochVector;
use qtraj_core::cascade::CascadeConfig;
use qtraj_core::config::{MeasurementAxis, MeasurementConfig};
use qtraj_core::generator::GeneratorSettings;

use crate::error::{CliError, CliErrorKind};
use crate::units::{parse_duration, parse_frequency, parse_rate};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub measurement: Option<MeasurementSection>,
    pub cascade: Option<CascadeSection>,
    pub n_steps: Option<usize>,
    pub substeps_per_dt: Option<usize>,
    /// Optional relaxation time for the generator truth, e.g. "30us".
    pub t1: Option<String>,
    /// Initial Bloch vector [x, y, z]; defaults to the equator (1, 0, 0).
    pub initial_state: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSection {
    pub tau: Option<String>,
    pub chi_over_kappa: Option<f64>,
    pub nbar: Option<f64>,
    pub kappa: Option<String>,
    pub eta_m: f64,
    pub dt: String,
    pub t2star: Option<String>,
    pub rabi_frequency: Option<String>,
    pub gamma: Option<String>,
    pub axis: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeSection {
    pub tau: String,
    pub dt: String,
    pub eta_m: f64,
    /// Six pair rates ordered 00|01, 00|10, 00|11, 01|10, 01|11, 10|11;
    /// a single entry applies to all pairs.
    pub gamma_pair: Option<Vec<String>>,
    /// "product", "bell", or one of "00", "01", "10", "11".
    pub initial: Option<String>,
}

/// A fully resolved single-qubit run, still without a seed.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub config: MeasurementConfig,
    pub n_steps: usize,
    pub substeps_per_dt: usize,
    pub t1: Option<f64>,
    pub initial_state: BlochVector,
}

impl ResolvedRun {
    pub fn settings(&self, seed: u64) -> Result<GeneratorSettings, CliError> {
        Ok(GeneratorSettings::new(
            self.config,
            self.n_steps,
            seed,
            self.substeps_per_dt,
            self.t1,
            self.initial_state,
        )?)
    }
}

/// A fully resolved cascade run, still without a seed.
#[derive(Debug, Clone)]
pub struct ResolvedCascade {
    pub config: CascadeConfig,
    pub n_steps: usize,
    pub initial: qtraj_core::cascade::TwoQubitBayesState,
    pub initial_label: String,
}

pub fn parse_axis(axis: &str) -> Result<MeasurementAxis, CliError> {
    match axis.to_ascii_lowercase().as_str() {
        "z" => Ok(MeasurementAxis::Z),
        "phi" => Ok(MeasurementAxis::Phi),
        other => Err(CliError::new(
            CliErrorKind::Config,
            format!("axis must be z or phi, got {other:?}"),
        )),
    }
}

fn config_error(message: String) -> CliError {
    CliError::new(CliErrorKind::Config, message)
}

impl MeasurementSection {
    pub fn resolve(&self) -> Result<MeasurementConfig, CliError> {
        let dt = parse_duration(&self.dt, "measurement.dt")?;
        let t2star = match &self.t2star {
            Some(raw) => parse_duration(raw, "measurement.t2star")?,
            None => f64::INFINITY,
        };
        let omega = match &self.rabi_frequency {
            Some(raw) => {
                2.0 * std::f64::consts::PI * parse_frequency(raw, "measurement.rabi_frequency")?
            }
            None => 0.0,
        };
        let axis = match &self.axis {
            Some(raw) => parse_axis(raw)?,
            None => MeasurementAxis::Z,
        };

        let mut config = match (&self.tau, self.chi_over_kappa, self.nbar, &self.kappa) {
            (Some(tau), None, None, None) => MeasurementConfig::from_projection_time(
                parse_duration(tau, "measurement.tau")?,
                self.eta_m,
                dt,
                t2star,
                omega,
                axis,
            )?,
            (None, Some(ratio), Some(nbar), Some(kappa)) => MeasurementConfig::from_physical(
                ratio,
                nbar,
                self.eta_m,
                2.0 * std::f64::consts::PI * parse_frequency(kappa, "measurement.kappa")?,
                dt,
                t2star,
                omega,
                axis,
            )?,
            _ => {
                return Err(config_error(
                    "measurement needs either tau, or all of chi_over_kappa/nbar/kappa".into(),
                ))
            }
        };

        if let Some(raw) = &self.gamma {
            config = config.with_dephasing_rate(parse_rate(raw, "measurement.gamma")?)?;
        }
        Ok(config)
    }
}

impl ConfigFile {
    pub fn parse(raw: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(raw)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let raw = std::fs::read_to_string(path)?;
        Self::parse(&raw)
    }

    pub fn resolve_run(&self) -> Result<ResolvedRun, CliError> {
        let section = self
            .measurement
            .as_ref()
            .ok_or_else(|| config_error("config has no measurement section".into()))?;
        let config = section.resolve()?;
        let initial = self.initial_state.unwrap_or([1.0, 0.0, 0.0]);
        let initial_state = BlochVector::new(initial[0], initial[1], initial[2])?;
        let t1 = match &self.t1 {
            Some(raw) => {
                let value = parse_duration(raw, "t1")?;
                if value.is_infinite() { None } else { Some(value) }
            }
            None => None,
        };
        Ok(ResolvedRun {
            config,
            n_steps: self.n_steps.unwrap_or(100),
            substeps_per_dt: self.substeps_per_dt.unwrap_or(1),
            t1,
            initial_state,
        })
    }

    pub fn resolve_cascade(&self) -> Result<ResolvedCascade, CliError> {
        use qtraj_core::cascade::TwoQubitBayesState;
        let section = self
            .cascade
            .as_ref()
            .ok_or_else(|| config_error("config has no cascade section".into()))?;
        let gamma_pair: [f64; 6] = match &section.gamma_pair {
            None => [0.0; 6],
            Some(raw) if raw.len() == 1 => {
                [parse_rate(&raw[0], "cascade.gamma_pair")?; 6]
            }
            Some(raw) if raw.len() == 6 => {
                let mut out = [0.0; 6];
                for (slot, value) in out.iter_mut().zip(raw) {
                    *slot = parse_rate(value, "cascade.gamma_pair")?;
                }
                out
            }
            Some(raw) => {
                return Err(config_error(format!(
                    "cascade.gamma_pair needs 1 or 6 entries, got {}",
                    raw.len()
                )))
            }
        };
        let config = CascadeConfig::new(
            parse_duration(&section.tau, "cascade.tau")?,
            parse_duration(&section.dt, "cascade.dt")?,
            section.eta_m,
            gamma_pair,
        )?;
        let label = section.initial.clone().unwrap_or_else(|| "product".into());
        let initial = match label.as_str() {
            "product" => TwoQubitBayesState::product_superposition(),
            "bell" => TwoQubitBayesState::bell_odd(),
            "00" => TwoQubitBayesState::basis_state(0),
            "01" => TwoQubitBayesState::basis_state(1),
            "10" => TwoQubitBayesState::basis_state(2),
            "11" => TwoQubitBayesState::basis_state(3),
            other => {
                return Err(config_error(format!("unknown cascade initial state {other:?}")))
            }
        };
        Ok(ResolvedCascade {
            config,
            n_steps: self.n_steps.unwrap_or(40),
            initial,
            initial_label: label,
        })
    }
}
