//! Trajectory reconstruction, seeded parallel ensembles, greyscale
//! histograms, and final-state post-selection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{BlochVector, Component, Trajectory};
use crate::config::MeasurementConfig;
use crate::error::{Error, Result};
use crate::generator::{
    generate_record_with_stream, step_state, GeneratorSettings, MAX_RABI_ANGLE,
};
use crate::record::MeasurementRecord;

/// Chunk of trajectory indices each worker owns. Partial results are merged
/// in index order, so ensemble outputs do not depend on the thread count.
const CHUNK: usize = 256;

/// Reconstruct the conditioned trajectory from a record via the two-step
/// update: Bayesian kick with r_k, then the Rabi rotation over dt.
pub fn reconstruct(
    record: &MeasurementRecord,
    q_initial: BlochVector,
    config: &MeasurementConfig,
) -> Result<Trajectory> {
    if config.omega != 0.0 && config.omega.abs() * config.dt > MAX_RABI_ANGLE {
        return Err(Error::TwoStepValidity(config.omega.abs() * config.dt));
    }
    if record.axis() != config.axis {
        return Err(Error::Domain("record axis does not match the config".into()));
    }
    let dt_mismatch = (record.dt() - config.dt).abs() > 1e-12 * config.dt;
    if dt_mismatch {
        return Err(Error::Domain(format!(
            "record dt {} does not match config dt {}",
            record.dt(),
            config.dt
        )));
    }
    if !q_initial.is_valid() {
        return Err(Error::Domain("initial state is outside the Bloch ball".into()));
    }

    let mut states = Vec::with_capacity(record.len() + 1);
    let mut q = q_initial;
    states.push(q);
    for &r in record.samples() {
        q = step_state(q, r, config);
        states.push(q);
    }
    Trajectory::new(states, config.dt)
}

/// Generate `n_traj` independent (record, reconstruction) pairs. Trajectory i
/// uses RNG stream i of the master seed, so results are reproducible and
/// independent of the worker count.
pub fn run_ensemble(
    n_traj: usize,
    settings: &GeneratorSettings,
) -> Result<Vec<(MeasurementRecord, Trajectory)>> {
    if n_traj == 0 {
        return Err(Error::Domain("n_traj must be at least 1".into()));
    }
    let cells = n_traj.checked_mul(settings.n_steps + 1);
    if cells.is_none_or(|c| c > 1 << 31) {
        return Err(Error::Domain(format!(
            "ensemble of {n_traj} trajectories x {} steps exceeds the in-memory budget",
            settings.n_steps
        )));
    }
    settings.validate()?;
    (0..n_traj as u64)
        .into_par_iter()
        .map(|stream| {
            let (record, _) = generate_record_with_stream(settings, stream)?;
            let traj = reconstruct(&record, settings.initial_state, &settings.config)?;
            Ok((record, traj))
        })
        .collect()
}

/// Per-step mean and standard deviation of each Bloch component over an
/// ensemble, accumulated without materializing the trajectories.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleStats {
    pub dt: f64,
    pub n_traj: usize,
    /// Indexed `[component][step]` with components ordered x, y, z.
    pub mean: [Vec<f64>; 3],
    /// Sample standard deviation, same indexing.
    pub sd: [Vec<f64>; 3],
}

impl EnsembleStats {
    /// Standard error of the mean for one component at one step.
    pub fn se(&self, component: Component, k: usize) -> f64 {
        self.sd[component as usize][k] / (self.n_traj as f64).sqrt()
    }
}

struct MomentAccum {
    sum: [Vec<f64>; 3],
    sum_sq: [Vec<f64>; 3],
}

impl MomentAccum {
    fn new(len: usize) -> Self {
        Self {
            sum: [vec![0.0; len], vec![0.0; len], vec![0.0; len]],
            sum_sq: [vec![0.0; len], vec![0.0; len], vec![0.0; len]],
        }
    }

    fn add(&mut self, traj: &Trajectory) {
        for (k, q) in traj.states().iter().enumerate() {
            for (c, v) in [q.x, q.y, q.z].into_iter().enumerate() {
                self.sum[c][k] += v;
                self.sum_sq[c][k] += v * v;
            }
        }
    }

    fn merge(&mut self, other: &MomentAccum) {
        for c in 0..3 {
            for k in 0..self.sum[c].len() {
                self.sum[c][k] += other.sum[c][k];
                self.sum_sq[c][k] += other.sum_sq[c][k];
            }
        }
    }
}

/// Streaming ensemble statistics over reconstructed trajectories.
pub fn ensemble_stats(n_traj: usize, settings: &GeneratorSettings) -> Result<EnsembleStats> {
    if n_traj == 0 {
        return Err(Error::Domain("n_traj must be at least 1".into()));
    }
    settings.validate()?;
    let len = settings.n_steps + 1;

    let starts: Vec<usize> = (0..n_traj).step_by(CHUNK).collect();
    let partials: Vec<Result<MomentAccum>> = starts
        .par_iter()
        .map(|&start| {
            let mut acc = MomentAccum::new(len);
            for stream in start..(start + CHUNK).min(n_traj) {
                let (record, _) = generate_record_with_stream(settings, stream as u64)?;
                let traj = reconstruct(&record, settings.initial_state, &settings.config)?;
                acc.add(&traj);
            }
            Ok(acc)
        })
        .collect();

    let mut total = MomentAccum::new(len);
    for partial in partials {
        total.merge(&partial?);
    }

    let n = n_traj as f64;
    let mut mean: [Vec<f64>; 3] = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    let mut sd: [Vec<f64>; 3] = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for c in 0..3 {
        for k in 0..len {
            let m = total.sum[c][k] / n;
            mean[c][k] = m;
            let var = if n_traj > 1 {
                ((total.sum_sq[c][k] - n * m * m) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            sd[c][k] = var.sqrt();
        }
    }
    Ok(EnsembleStats { dt: settings.config.dt, n_traj, mean, sd })
}

/// Greyscale time-value histogram of one Bloch component over an ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleHistogram {
    pub component: Component,
    pub dt: f64,
    /// Uniform value grid on [-1, 1].
    pub n_bins: usize,
    /// Raw counts indexed `[step][bin]`.
    pub counts: Vec<Vec<u32>>,
    /// Column-normalized weights (most frequent value per time column = 1),
    /// present once `normalize` has run.
    pub normalized: Option<Vec<Vec<f64>>>,
}

pub const DEFAULT_HISTOGRAM_BINS: usize = 101;

impl EnsembleHistogram {
    pub fn from_trajectories(
        trajs: &[Trajectory],
        component: Component,
        n_bins: usize,
    ) -> Result<Self> {
        let Some(first) = trajs.first() else {
            return Err(Error::EmptyEnsemble);
        };
        if n_bins == 0 {
            return Err(Error::Domain("histogram needs at least one bin".into()));
        }
        let steps = first.len();
        if trajs.iter().any(|t| t.len() != steps) {
            return Err(Error::Domain("histogram needs equal-length trajectories".into()));
        }
        let mut counts = vec![vec![0u32; n_bins]; steps];
        let width = 2.0 / n_bins as f64;
        for traj in trajs {
            for (k, q) in traj.states().iter().enumerate() {
                let v = q.component(component);
                // values on a bin edge fall to the lower bin
                let idx = (((v + 1.0) / width).ceil() as isize - 1).clamp(0, n_bins as isize - 1);
                counts[k][idx as usize] += 1;
            }
        }
        Ok(Self { component, dt: first.dt(), n_bins, counts, normalized: None })
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        -1.0 + (i as f64 + 0.5) * 2.0 / self.n_bins as f64
    }

    /// Normalize each time column so its most frequent value maps to 1.
    pub fn normalize(&mut self) {
        let normalized = self
            .counts
            .iter()
            .map(|col| {
                let max = col.iter().copied().max().unwrap_or(0).max(1) as f64;
                col.iter().map(|&c| c as f64 / max).collect()
            })
            .collect();
        self.normalized = Some(normalized);
    }
}

/// Final-state window for selecting a sub-ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostSelectionWindow {
    pub x_center: f64,
    pub x_half_width: f64,
    pub z_center: f64,
    pub z_half_width: f64,
    /// Selection time; must lie on the trajectory grid.
    pub t_final: f64,
    /// Optional y window for phase-diffusion studies; ignored when `None`.
    pub y_window: Option<(f64, f64)>,
}

impl PostSelectionWindow {
    pub fn new(
        x_center: f64,
        x_half_width: f64,
        z_center: f64,
        z_half_width: f64,
        t_final: f64,
    ) -> Result<Self> {
        for (label, center, hw) in
            [("x", x_center, x_half_width), ("z", z_center, z_half_width)]
        {
            if !(hw > 0.0) {
                return Err(Error::Domain(format!("{label} half-width must be positive")));
            }
            if !(-1.0..=1.0).contains(&center) {
                return Err(Error::Domain(format!("{label} center must lie in [-1, 1]")));
            }
        }
        Ok(Self { x_center, x_half_width, z_center, z_half_width, t_final, y_window: None })
    }

    pub fn with_y_window(mut self, center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(-1.0..=1.0).contains(&center) {
            return Err(Error::Domain("invalid y window".into()));
        }
        self.y_window = Some((center, half_width));
        Ok(self)
    }

    pub fn contains(&self, q: BlochVector) -> bool {
        let mut inside = (q.x - self.x_center).abs() <= self.x_half_width
            && (q.z - self.z_center).abs() <= self.z_half_width;
        if let Some((yc, yhw)) = self.y_window {
            inside &= (q.y - yc).abs() <= yhw;
        }
        inside
    }
}

/// Keep the trajectories whose state at the window time falls inside the
/// window. An empty selection is an empty list, not an error.
pub fn post_select(trajs: &[Trajectory], window: &PostSelectionWindow) -> Result<Vec<Trajectory>> {
    let Some(first) = trajs.first() else {
        return Err(Error::EmptyEnsemble);
    };
    let k = first.index_at(window.t_final)?;
    Ok(trajs.iter().filter(|t| window.contains(t.state(k))).cloned().collect())
}
