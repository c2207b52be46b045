//! Synthetic measurement records with ground-truth state histories.
//!
//! Outcomes are drawn from the exact single-step mixture: pick a σ_z branch
//! with the Born weights of the current state, then add Gaussian noise of
//! variance τ/δt. Strong (jump-regime) and weak (diffusive) measurements run
//! through the same path; only the per-step strength differs.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bloch::{BlochVector, Trajectory};
use crate::config::{MeasurementAxis, MeasurementConfig};
use crate::error::{Error, Result};
use crate::measurement::{bayes_update, rabi_rotate};
use crate::record::MeasurementRecord;

/// Largest Rabi angle per update step for which the sequential two-step
/// update is a faithful discretization.
pub const MAX_RABI_ANGLE: f64 = 0.1;

/// Everything needed to synthesize one measurement record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSettings {
    pub config: MeasurementConfig,
    pub n_steps: usize,
    pub seed: u64,
    /// Internal substeps per emitted sample; the emitted r_k is the substep average.
    pub substeps_per_dt: usize,
    /// Optional energy-relaxation time, s. Relaxation acts only on the
    /// generated truth; the reconstruction equations deliberately omit it.
    pub t1: Option<f64>,
    pub initial_state: BlochVector,
}

impl GeneratorSettings {
    pub fn new(
        config: MeasurementConfig,
        n_steps: usize,
        seed: u64,
        substeps_per_dt: usize,
        t1: Option<f64>,
        initial_state: BlochVector,
    ) -> Result<Self> {
        let s = Self { config, n_steps, seed, substeps_per_dt, t1, initial_state };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::Settings("n_steps must be at least 1".into()));
        }
        if self.substeps_per_dt == 0 {
            return Err(Error::Settings("substeps_per_dt must be at least 1".into()));
        }
        if !self.initial_state.is_valid() {
            return Err(Error::Settings("initial state is outside the Bloch ball".into()));
        }
        if let Some(t1) = self.t1 {
            if !(t1 > 0.0) {
                return Err(Error::Settings(format!("T1 must be positive, got {t1}")));
            }
        }
        let sub_dt = self.substep_duration();
        if self.config.omega != 0.0 && self.config.omega.abs() * sub_dt > MAX_RABI_ANGLE {
            return Err(Error::Settings(format!(
                "Rabi angle per substep is {:.3} rad; raise substeps_per_dt",
                self.config.omega.abs() * sub_dt
            )));
        }
        if self.substeps_per_dt > 1 && sub_dt > self.config.tau / 10.0 {
            return Err(Error::Settings(format!(
                "substep duration {sub_dt} s exceeds tau/10; raise substeps_per_dt"
            )));
        }
        Ok(())
    }

    pub fn substep_duration(&self) -> f64 {
        self.config.dt / self.substeps_per_dt as f64
    }

    /// Config describing one substep of the same physics.
    pub fn substep_config(&self) -> Result<MeasurementConfig> {
        if self.substeps_per_dt == 1 {
            Ok(self.config)
        } else {
            self.config.rescaled_dt(self.substep_duration())
        }
    }
}

/// Amplitude damping toward the ground pole over `dt`:
/// z' = 1 − (1 − z)·e^(−dt/T1), equator shrinks by e^(−dt/2T1).
pub fn relax_map(q: BlochVector, dt: f64, t1: f64) -> BlochVector {
    let pop = (-dt / t1).exp();
    let coh = (-dt / (2.0 * t1)).exp();
    BlochVector { x: q.x * coh, y: q.y * coh, z: 1.0 - (1.0 - q.z) * pop }
}

/// Exact single-step mixture sampling for a z-measurement: Born-weighted
/// branch choice plus Gaussian noise of standard deviation `width`.
pub(crate) fn sample_z_outcome(q: BlochVector, width: f64, rng: &mut ChaCha8Rng) -> f64 {
    let center = if rng.random::<f64>() < 0.5 * (1.0 + q.z) { 1.0 } else { -1.0 };
    let noise: f64 = rng.sample(StandardNormal);
    center + width * noise
}

fn sample_outcome(
    q: BlochVector,
    width: f64,
    axis: MeasurementAxis,
    rng: &mut ChaCha8Rng,
) -> f64 {
    match axis {
        MeasurementAxis::Z => sample_z_outcome(q, width, rng),
        MeasurementAxis::Phi => {
            let noise: f64 = rng.sample(StandardNormal);
            width * noise
        }
    }
}

/// One measurement step of the true state: Bayesian kick, Rabi rotation,
/// optional relaxation. Shared with the reconstruction path so that a record
/// generated without substeps or relaxation replays bit-identically.
pub(crate) fn step_state(q: BlochVector, r: f64, config: &MeasurementConfig) -> BlochVector {
    let q = bayes_update(q, r, config);
    if config.omega != 0.0 {
        rabi_rotate(q, config.omega * config.dt)
    } else {
        q
    }
}

/// Generate a record and the matching ground-truth trajectory, both at dt
/// resolution. Deterministic in the seed and (for ensembles) the stream.
pub fn generate_record_with_stream(
    settings: &GeneratorSettings,
    stream: u64,
) -> Result<(MeasurementRecord, Trajectory)> {
    settings.validate()?;
    let cfg = &settings.config;
    let sub_cfg = settings.substep_config()?;
    let sub_dt = settings.substep_duration();
    let width = (cfg.tau / sub_dt).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    rng.set_stream(stream);

    let mut q = settings.initial_state;
    let mut samples = Vec::with_capacity(settings.n_steps);
    let mut states = Vec::with_capacity(settings.n_steps + 1);
    states.push(q);

    for _ in 0..settings.n_steps {
        let mut acc = 0.0;
        for _ in 0..settings.substeps_per_dt {
            let r = sample_outcome(q, width, cfg.axis, &mut rng);
            acc += r;
            q = step_state(q, r, &sub_cfg);
            if let Some(t1) = settings.t1 {
                q = relax_map(q, sub_dt, t1);
            }
        }
        samples.push(acc / settings.substeps_per_dt as f64);
        states.push(q);
    }

    let record = MeasurementRecord::new(samples, cfg.dt, settings.seed, cfg.axis)?;
    let truth = Trajectory::new(states, cfg.dt)?;
    Ok((record, truth))
}

/// Generate a single record (stream 0).
pub fn generate_record(settings: &GeneratorSettings) -> Result<(MeasurementRecord, Trajectory)> {
    generate_record_with_stream(settings, 0)
}
