//! Cascaded two-qubit half-parity measurement.
//!
//! A single tone probes both cavities in series and acquires phase shifts
//! that distinguish |00⟩ and |11⟩ while leaving the odd-parity pair
//! degenerate. In the computational basis the state is four populations plus
//! the magnitudes of the six coherences. Populations follow the same
//! Gaussian Bayes rule as the single-qubit case with pointer centers
//! (−2, 0, 0, +2); coherences follow the population geometric mean, an
//! intrinsic pair dephasing, and a collection penalty that vanishes inside
//! the degenerate odd subspace.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Basis order: |00⟩, |01⟩, |10⟩, |11⟩.
pub const BASIS_LABELS: [&str; 4] = ["00", "01", "10", "11"];

/// Dimensionless pointer centers of the outcome histograms per basis state.
pub const CENTERS: [f64; 4] = [-2.0, 0.0, 0.0, 2.0];

/// Unordered index pairs for the six coherences, in storage order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Storage index of the |01⟩⟨10| coherence, the entanglement witness.
pub const ODD_PAIR: usize = 3;

/// Tolerance on the coherence positivity bound m ≤ √(p_i·p_j).
pub const COHERENCE_TOL: f64 = 1e-9;

/// Measurement parameters of the cascaded probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    /// Projection timescale τ, s.
    pub tau: f64,
    /// Step duration Δt, s.
    pub dt: f64,
    /// Collection efficiency, in (0, 1].
    pub eta_m: f64,
    /// Intrinsic dephasing rate of each coherence pair, s⁻¹.
    pub gamma_pair: [f64; 6],
}

impl CascadeConfig {
    pub fn new(tau: f64, dt: f64, eta_m: f64, gamma_pair: [f64; 6]) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        if !(eta_m > 0.0 && eta_m <= 1.0) {
            return Err(Error::Domain(format!("eta_m must lie in (0, 1], got {eta_m}")));
        }
        if gamma_pair.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::Domain("pair dephasing rates must be nonnegative".into()));
        }
        Ok(Self { tau, dt, eta_m, gamma_pair })
    }

    /// Standard deviation σ = √(τ/Δt) of the outcome histograms.
    pub fn sigma(&self) -> f64 {
        (self.tau / self.dt).sqrt()
    }

    /// Per-step attenuation of pair coherence from uncollected photons:
    /// exp(−(1 − η_m)·(c_i − c_j)²·Δt / (8τη_m)). Identically one for the
    /// degenerate odd pair, for any efficiency.
    pub fn collection_factor(&self, pair: usize) -> f64 {
        let (i, j) = PAIRS[pair];
        let gap = CENTERS[i] - CENTERS[j];
        (-(1.0 - self.eta_m) * gap * gap * self.dt / (8.0 * self.tau * self.eta_m)).exp()
    }
}

/// Joint qubit state in the computational basis: four populations and the
/// magnitudes of the six coherences (phases are not tracked).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitBayesState {
    pub populations: [f64; 4],
    pub coherences: [f64; 6],
}

impl TwoQubitBayesState {
    pub fn new(populations: [f64; 4], coherences: [f64; 6]) -> Result<Self> {
        let state = Self { populations, coherences };
        state.check()?;
        Ok(state)
    }

    /// Both qubits in (|0⟩ + |1⟩)/√2: uniform populations, all coherences 1/4.
    pub fn product_superposition() -> Self {
        Self { populations: [0.25; 4], coherences: [0.25; 6] }
    }

    /// Odd-parity Bell state (|01⟩ + |10⟩)/√2.
    pub fn bell_odd() -> Self {
        let mut coherences = [0.0; 6];
        coherences[ODD_PAIR] = 0.5;
        Self { populations: [0.0, 0.5, 0.5, 0.0], coherences }
    }

    pub fn basis_state(index: usize) -> Self {
        let mut populations = [0.0; 4];
        populations[index] = 1.0;
        Self { populations, coherences: [0.0; 6] }
    }

    pub fn check(&self) -> Result<()> {
        if self.populations.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Domain("populations must be finite and nonnegative".into()));
        }
        let total: f64 = self.populations.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("populations sum to {total}, not 1")));
        }
        for (pair, &(i, j)) in PAIRS.iter().enumerate() {
            let m = self.coherences[pair];
            if !m.is_finite() || m < 0.0 {
                return Err(Error::Domain("coherence magnitudes must be nonnegative".into()));
            }
            let bound = (self.populations[i] * self.populations[j]).sqrt();
            if m > bound + COHERENCE_TOL {
                return Err(Error::Domain(format!(
                    "coherence {}|{} = {m} exceeds population bound {bound}",
                    BASIS_LABELS[i], BASIS_LABELS[j]
                )));
            }
        }
        Ok(())
    }

    pub fn p_odd(&self) -> f64 {
        self.populations[1] + self.populations[2]
    }
}

/// Entanglement monotone 2·max(0, m_{01,10} − √(p00·p11)): 1 for an odd Bell
/// state, 0 for anything separable-looking. Exact for states with support on
/// the computational coherence structure tracked here.
pub fn concurrence(state: &TwoQubitBayesState) -> f64 {
    let penalty = (state.populations[0] * state.populations[3]).sqrt();
    2.0 * (state.coherences[ODD_PAIR] - penalty).max(0.0)
}

/// Draw one outcome: pick a pointer center with the population weights, add
/// Gaussian noise of width σ.
pub fn cascade_sample(
    state: &TwoQubitBayesState,
    config: &CascadeConfig,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let u: f64 = rng.random();
    let p = &state.populations;
    let center = if u < p[0] {
        CENTERS[0]
    } else if u < p[0] + p[1] + p[2] {
        0.0
    } else {
        CENTERS[3]
    };
    let noise: f64 = rng.sample(StandardNormal);
    center + config.sigma() * noise
}

/// Bayesian population update: p_i ∝ p_i·exp(−(r − c_i)²/2σ²), renormalized.
/// Weights are computed with a common exponent shift, so far-out outcomes
/// stay in the log domain instead of underflowing.
pub fn cascade_update_diag(
    state: &TwoQubitBayesState,
    r: f64,
    config: &CascadeConfig,
) -> Result<TwoQubitBayesState> {
    let inv_two_var = config.dt / (2.0 * config.tau);
    let exponents: [f64; 4] = std::array::from_fn(|i| {
        let d = r - CENTERS[i];
        -d * d * inv_two_var
    });
    let shift = exponents
        .iter()
        .zip(state.populations.iter())
        .filter(|(_, &p)| p > 0.0)
        .map(|(&e, _)| e)
        .fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Err(Error::ZeroProbability);
    }
    let mut populations: [f64; 4] =
        std::array::from_fn(|i| state.populations[i] * (exponents[i] - shift).exp());
    let total: f64 = populations.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::ZeroProbability);
    }
    for p in &mut populations {
        *p /= total;
    }
    Ok(TwoQubitBayesState { populations, coherences: state.coherences })
}

/// Coherence update following a diagonal update: each magnitude scales with
/// the geometric mean of its population ratios, the intrinsic pair
/// dephasing, and the collection penalty. A coherence attached to an
/// extinguished population goes to zero.
pub fn cascade_update_offdiag(
    before: &TwoQubitBayesState,
    after_diag: &TwoQubitBayesState,
    config: &CascadeConfig,
) -> TwoQubitBayesState {
    let mut coherences = [0.0; 6];
    for (pair, &(i, j)) in PAIRS.iter().enumerate() {
        let m = before.coherences[pair];
        if m == 0.0 {
            continue;
        }
        let denom = before.populations[i] * before.populations[j];
        let numer = after_diag.populations[i] * after_diag.populations[j];
        if !(denom > 0.0) || !(numer > 0.0) {
            continue; // population extinguished; the coherence dies with it
        }
        let bayes_ratio = (numer / denom).sqrt();
        let intrinsic = (-config.gamma_pair[pair] * config.dt).exp();
        coherences[pair] = m * bayes_ratio * intrinsic * config.collection_factor(pair);
    }
    TwoQubitBayesState { populations: after_diag.populations, coherences }
}

/// One full measurement step.
pub fn cascade_step(
    state: &TwoQubitBayesState,
    r: f64,
    config: &CascadeConfig,
) -> Result<TwoQubitBayesState> {
    let after_diag = cascade_update_diag(state, r, config)?;
    Ok(cascade_update_offdiag(state, &after_diag, config))
}

/// Simulate one conditioned trajectory: sample, update populations, update
/// coherences; emit the state and its concurrence at every grid point
/// (including the initial one). Deterministic in seed and stream.
pub fn cascade_trajectory_with_stream(
    initial: &TwoQubitBayesState,
    n_steps: usize,
    config: &CascadeConfig,
    seed: u64,
    stream: u64,
) -> Result<Vec<(TwoQubitBayesState, f64)>> {
    initial.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut state = *initial;
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push((state, concurrence(&state)));
    for _ in 0..n_steps {
        let r = cascade_sample(&state, config, &mut rng);
        state = cascade_step(&state, r, config)?;
        out.push((state, concurrence(&state)));
    }
    Ok(out)
}

pub fn cascade_trajectory(
    initial: &TwoQubitBayesState,
    n_steps: usize,
    config: &CascadeConfig,
    seed: u64,
) -> Result<Vec<(TwoQubitBayesState, f64)>> {
    cascade_trajectory_with_stream(initial, n_steps, config, seed, 0)
}
