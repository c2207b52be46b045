//! Dimensionless measurement records.

use serde::{Deserialize, Serialize};

use crate::config::MeasurementAxis;
use crate::error::{Error, Result};

/// A time-ordered set of dimensionless outcomes r_k, one per step of
/// duration `dt`, together with the RNG seed that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    samples: Vec<f64>,
    dt: f64,
    seed: u64,
    axis: MeasurementAxis,
}

impl MeasurementRecord {
    pub fn new(samples: Vec<f64>, dt: f64, seed: u64, axis: MeasurementAxis) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("record must hold at least one sample".into()));
        }
        if samples.iter().any(|r| !r.is_finite()) {
            return Err(Error::Domain("record contains a non-finite sample".into()));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("record dt must be positive, got {dt}")));
        }
        Ok(Self { samples, dt, seed, axis })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn axis(&self) -> MeasurementAxis {
        self.axis
    }

    /// Time-averaged outcome r̄ over the first `k` steps (all steps if `k`
    /// exceeds the record length).
    pub fn time_average(&self, k: usize) -> f64 {
        let k = k.min(self.samples.len()).max(1);
        self.samples[..k].iter().sum::<f64>() / k as f64
    }
}
