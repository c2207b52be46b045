//! Emulated conditional quantum state tomography: projective readout after
//! an optional axis-mapping pulse, and sub-ensemble estimation conditioned
//! either on the time-averaged record value or on a trajectory matching
//! window.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochVector;
use crate::config::MeasurementConfig;
use crate::ensemble::reconstruct;
use crate::error::{Error, Result};
use crate::record::MeasurementRecord;

/// Tomography readout axis. The axis component is mapped onto the readout
/// basis by the standard π/2 pre-rotation (about ŷ for x, about −x̂ for y,
/// no pulse for z), after which the projective outcome is ±1 with
/// P(+1) = (1 + component)/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TomoAxis {
    X,
    Y,
    Z,
}

impl TomoAxis {
    pub const ALL: [TomoAxis; 3] = [TomoAxis::X, TomoAxis::Y, TomoAxis::Z];

    fn component(self, q: BlochVector) -> f64 {
        match self {
            TomoAxis::X => q.x,
            TomoAxis::Y => q.y,
            TomoAxis::Z => q.z,
        }
    }

    fn index(self) -> usize {
        match self {
            TomoAxis::X => 0,
            TomoAxis::Y => 1,
            TomoAxis::Z => 2,
        }
    }
}

/// Sample a projective readout of `axis`: +1 with probability
/// (1 + component)/2.
pub fn projective_sample(q: BlochVector, axis: TomoAxis, rng: &mut impl Rng) -> i8 {
    let p_plus = 0.5 * (1.0 + axis.component(q));
    if rng.random::<f64>() < p_plus {
        1
    } else {
        -1
    }
}

/// One experimental iteration: a weak record segment followed by a single
/// projective readout along one tomography axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyShot {
    pub record: MeasurementRecord,
    pub axis: TomoAxis,
    /// Projective outcome, ±1.
    pub outcome: i8,
}

impl TomographyShot {
    pub fn new(record: MeasurementRecord, axis: TomoAxis, outcome: i8) -> Result<Self> {
        if outcome != 1 && outcome != -1 {
            return Err(Error::Domain(format!("outcome must be ±1, got {outcome}")));
        }
        Ok(Self { record, axis, outcome })
    }
}

/// How shots are assigned to the conditioned sub-ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TomoCondition {
    /// Select on the time-averaged record value r̄ over the first `k` steps.
    /// The window widens adaptively until it holds enough shots.
    ScalarWindow { center: f64, half_width: f64 },
    /// Select on the reconstructed (x, z) at step `k` relative to a target
    /// trajectory point, with y assumed zero. Fixed width.
    MatchingWindow { x: f64, z: f64, half_width: f64 },
}

/// Minimum sub-ensemble size the scalar window widens toward.
pub const SCALAR_WINDOW_TARGET: usize = 200;

/// Mean outcome, standard error and count for one axis.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AxisEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Conditioned tomographic estimate of the Bloch components.
#[derive(Debug, Clone, Serialize)]
pub struct TomographyEstimate {
    /// Ordered x, y, z.
    pub axes: [AxisEstimate; 3],
    /// Total shots in the conditioned sub-ensemble (all axes).
    pub selected: usize,
    /// Window half-width actually used after any adaptive widening.
    pub half_width_used: f64,
    /// Set when the scalar window had to widen beyond the requested width.
    pub widened: bool,
}

impl TomographyEstimate {
    pub fn axis(&self, axis: TomoAxis) -> AxisEstimate {
        self.axes[axis.index()]
    }
}

fn axis_estimate(outcomes: &[i8]) -> AxisEstimate {
    let n = outcomes.len();
    let mean = outcomes.iter().map(|&o| o as f64).sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let var =
            outcomes.iter().map(|&o| (o as f64 - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        f64::INFINITY
    };
    AxisEstimate { mean, std_error, n }
}

/// Estimate the conditioned state at step `k` from a pool of shots.
///
/// Scalar windows condition on r̄ over the first `k` steps (k = record length
/// when zero) and widen by half-decades until the sub-ensemble reaches
/// `SCALAR_WINDOW_TARGET` shots or covers the pool. Matching windows
/// condition on the reconstructed (x, z) at step `k` and never widen.
pub fn conditional_tomography(
    shots: &[TomographyShot],
    condition: TomoCondition,
    k: usize,
    q_initial: BlochVector,
    config: &MeasurementConfig,
) -> Result<TomographyEstimate> {
    if shots.is_empty() {
        return Err(Error::InsufficientStatistics { count: 0 });
    }

    // per-shot conditioning values
    enum Values {
        Scalar(Vec<f64>),
        Planar(Vec<(f64, f64)>),
    }
    let values = match condition {
        TomoCondition::ScalarWindow { .. } => Values::Scalar(
            shots
                .iter()
                .map(|s| s.record.time_average(if k == 0 { s.record.len() } else { k }))
                .collect(),
        ),
        TomoCondition::MatchingWindow { .. } => Values::Planar(
            shots
                .iter()
                .map(|s| {
                    let traj = reconstruct(&s.record, q_initial, config)?;
                    if k >= traj.len() {
                        return Err(Error::Domain(format!(
                            "matching step {k} beyond record of {} steps",
                            s.record.len()
                        )));
                    }
                    let q = traj.state(k);
                    Ok((q.x, q.z))
                })
                .collect::<Result<_>>()?,
        ),
    };

    let select = |half_width: f64| -> Vec<usize> {
        match (&values, condition) {
            (Values::Scalar(vals), TomoCondition::ScalarWindow { center, .. }) => vals
                .iter()
                .enumerate()
                .filter(|(_, &v)| (v - center).abs() <= half_width)
                .map(|(i, _)| i)
                .collect(),
            (Values::Planar(vals), TomoCondition::MatchingWindow { x, z, .. }) => vals
                .iter()
                .enumerate()
                .filter(|(_, &(vx, vz))| (vx - x).abs() <= half_width && (vz - z).abs() <= half_width)
                .map(|(i, _)| i)
                .collect(),
            _ => unreachable!("values follow the condition variant"),
        }
    };

    let requested = match condition {
        TomoCondition::ScalarWindow { half_width, .. }
        | TomoCondition::MatchingWindow { half_width, .. } => half_width,
    };
    if !(requested > 0.0) {
        return Err(Error::Domain("window half-width must be positive".into()));
    }

    let mut half_width = requested;
    let mut selected = select(half_width);
    if let TomoCondition::ScalarWindow { .. } = condition {
        let target = SCALAR_WINDOW_TARGET.min(shots.len());
        while selected.len() < target && selected.len() < shots.len() {
            half_width *= 1.5;
            selected = select(half_width);
        }
    }
    if selected.is_empty() {
        return Err(Error::InsufficientStatistics { count: 0 });
    }

    let mut per_axis: [Vec<i8>; 3] = Default::default();
    for &i in &selected {
        per_axis[shots[i].axis.index()].push(shots[i].outcome);
    }
    if per_axis.iter().any(|v| v.is_empty()) {
        return Err(Error::InsufficientStatistics { count: selected.len() });
    }

    Ok(TomographyEstimate {
        axes: [
            axis_estimate(&per_axis[0]),
            axis_estimate(&per_axis[1]),
            axis_estimate(&per_axis[2]),
        ],
        selected: selected.len(),
        half_width_used: half_width,
        widened: half_width > requested,
    })
}
