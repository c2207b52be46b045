//! Bloch-vector representation of a (possibly mixed) single-qubit state and
//! the time series built from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the Bloch-ball bound, allowing for float round-off.
pub const NORM_TOL: f64 = 1e-9;

/// A single-qubit state q = (x, y, z) with x² + y² + z² ≤ 1.
///
/// The ground state |0⟩ sits at z = +1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    /// Ground state |0⟩.
    pub const GROUND: Self = Self { x: 0.0, y: 0.0, z: 1.0 };
    /// Excited state |1⟩.
    pub const EXCITED: Self = Self { x: 0.0, y: 0.0, z: -1.0 };
    /// Equal superposition (|0⟩ + |1⟩)/√2.
    pub const PLUS_X: Self = Self { x: 1.0, y: 0.0, z: 0.0 };
    /// Maximally mixed state.
    pub const MIXED: Self = Self { x: 0.0, y: 0.0, z: 0.0 };

    /// Validating constructor: all components finite, norm within the ball.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let q = Self { x, y, z };
        if !q.is_valid() {
            return Err(Error::Domain(format!(
                "({x}, {y}, {z}) is not inside the Bloch ball"
            )));
        }
        Ok(q)
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.z.is_finite()
            && self.norm_sq() <= 1.0 + NORM_TOL
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Equatorial coherence magnitude √(x² + y²).
    pub fn coherence(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn component(&self, c: Component) -> f64 {
        match c {
            Component::X => self.x,
            Component::Y => self.y,
            Component::Z => self.z,
        }
    }
}

/// One Cartesian component of a Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    X,
    Y,
    Z,
}

impl Component {
    pub fn label(&self) -> &'static str {
        match self {
            Component::X => "x",
            Component::Y => "y",
            Component::Z => "z",
        }
    }
}

/// A conditioned state history on the uniform grid t_k = k·dt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    states: Vec<BlochVector>,
    dt: f64,
}

impl Trajectory {
    pub fn new(states: Vec<BlochVector>, dt: f64) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Domain("trajectory must hold at least one state".into()));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("trajectory dt must be positive, got {dt}")));
        }
        if let Some(q) = states.iter().find(|q| !q.is_valid()) {
            return Err(Error::Domain(format!("trajectory contains invalid state {q:?}")));
        }
        Ok(Self { states, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one state by construction
    }

    pub fn state(&self, k: usize) -> BlochVector {
        self.states[k]
    }

    pub fn states(&self) -> &[BlochVector] {
        &self.states
    }

    pub fn final_state(&self) -> BlochVector {
        *self.states.last().expect("non-empty by construction")
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.states.len()).map(|k| self.time(k))
    }

    /// Index of the grid point at time `t`, or an error if `t` is off-grid.
    pub fn index_at(&self, t: f64) -> Result<usize> {
        let k = (t / self.dt).round();
        let on_grid = k >= 0.0
            && (k as usize) < self.states.len()
            && (t - k * self.dt).abs() <= 1e-9 * self.dt.max(t.abs());
        if !on_grid {
            return Err(Error::OffGrid { t, dt: self.dt });
        }
        Ok(k as usize)
    }
}
