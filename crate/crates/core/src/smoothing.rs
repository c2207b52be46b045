//! Time-symmetric state estimation.
//!
//! The forward matrix ρ_t conditions on the record before t; the backward
//! effect matrix E_t conditions on the record after t. Together they predict
//! a hidden measurement at t through
//!
//!   P(m) ∝ Tr(Ω_m ρ_t Ω_m† E_t),
//!
//! which reduces exactly to the Born rule when E_t ∝ I and is invariant
//! under any positive rescaling of E_t.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::BlochVector;
use crate::config::{MeasurementAxis, MeasurementConfig};
use crate::error::{Error, Result};
use crate::generator::sample_z_outcome;
use crate::matrix::{projective_z_effects, HermitianMatrix2, Mat2};
use crate::record::MeasurementRecord;

/// Forward state and backward effect at one grid time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmoothedState {
    pub rho: HermitianMatrix2,
    pub effect: HermitianMatrix2,
    pub t: f64,
}

/// Exponents of the two diagonal entries of the outcome operator Ω_r,
/// shifted so the larger is zero. The common factor cancels against the
/// normalization of both propagation directions.
fn outcome_weights(r: f64, config: &MeasurementConfig) -> (f64, f64) {
    let quarter_inv_var = config.dt / (4.0 * config.tau); // 1/(4a²)
    let e_ground = -(r - 1.0) * (r - 1.0) * quarter_inv_var;
    let e_excited = -(r + 1.0) * (r + 1.0) * quarter_inv_var;
    let shift = e_ground.max(e_excited);
    ((e_ground - shift).exp(), (e_excited - shift).exp())
}

fn check_z_axis(config: &MeasurementConfig) -> Result<()> {
    if config.axis != MeasurementAxis::Z {
        return Err(Error::Domain(
            "matrix propagation is defined for the z measurement axis".into(),
        ));
    }
    Ok(())
}

/// One forward step: outcome operator, Rabi rotation, residual dephasing,
/// then renormalization to unit trace.
pub fn forward_step(
    rho: &HermitianMatrix2,
    r: f64,
    config: &MeasurementConfig,
) -> Result<HermitianMatrix2> {
    check_z_axis(config)?;
    let (g_ground, g_excited) = outcome_weights(r, config);
    let mut out = HermitianMatrix2 {
        m00: rho.m00 * g_ground * g_ground,
        m11: rho.m11 * g_excited * g_excited,
        m01: rho.m01 * (g_ground * g_excited),
    };
    let trace = out.trace();
    if !(trace > 0.0) || !trace.is_finite() {
        return Err(Error::ZeroProbability);
    }
    out = out.scale(1.0 / trace);
    if config.omega != 0.0 {
        out = Mat2::rotation_y(config.omega * config.dt).sandwich(&out);
    }
    out.m01 *= (-config.gamma * config.dt).exp();
    Ok(out)
}

/// One backward step: the adjoint of the forward map, applied in reverse
/// order (dephasing, inverse rotation, outcome operator), renormalized to
/// unit trace for numerical stability. The rescaling is semantics-free
/// because the prediction rule is scale-invariant in E.
pub fn backward_step(
    effect_next: &HermitianMatrix2,
    r: f64,
    config: &MeasurementConfig,
) -> Result<HermitianMatrix2> {
    check_z_axis(config)?;
    let mut e = *effect_next;
    e.m01 *= (-config.gamma * config.dt).exp();
    if config.omega != 0.0 {
        e = Mat2::rotation_y(config.omega * config.dt).adjoint().sandwich(&e);
    }
    let (g_ground, g_excited) = outcome_weights(r, config);
    let mut out = HermitianMatrix2 {
        m00: e.m00 * g_ground * g_ground,
        m11: e.m11 * g_excited * g_excited,
        m01: e.m01 * (g_ground * g_excited),
    };
    let trace = out.trace();
    if !(trace > 0.0) || !trace.is_finite() {
        return Err(Error::ZeroProbability);
    }
    out = out.scale(1.0 / trace);
    Ok(out)
}

/// Forward matrices ρ_{t_k} for k = 0..=n; index k conditions on r_0..r_{k-1}.
pub fn forward_states(
    record: &MeasurementRecord,
    rho_initial: &HermitianMatrix2,
    config: &MeasurementConfig,
) -> Result<Vec<HermitianMatrix2>> {
    let mut out = Vec::with_capacity(record.len() + 1);
    let mut rho = *rho_initial;
    out.push(rho);
    for &r in record.samples() {
        rho = forward_step(&rho, r, config)?;
        out.push(rho);
    }
    Ok(out)
}

/// Backward matrices E_{t_k} for k = 0..=n; index k conditions on
/// r_k..r_{n-1}, with the uninformative terminal condition E_{t_n} = I/2.
pub fn backward_effects(
    record: &MeasurementRecord,
    config: &MeasurementConfig,
) -> Result<Vec<HermitianMatrix2>> {
    let mut out = vec![HermitianMatrix2::half_identity(); record.len() + 1];
    let mut effect = HermitianMatrix2::half_identity();
    for (k, &r) in record.samples().iter().enumerate().rev() {
        effect = backward_step(&effect, r, config)?;
        out[k] = effect;
    }
    Ok(out)
}

/// Forward/backward sweep over one record.
pub fn smooth_record(
    record: &MeasurementRecord,
    rho_initial: &HermitianMatrix2,
    config: &MeasurementConfig,
) -> Result<Vec<SmoothedState>> {
    let forward = forward_states(record, rho_initial, config)?;
    let backward = backward_effects(record, config)?;
    Ok(forward
        .into_iter()
        .zip(backward)
        .enumerate()
        .map(|(k, (rho, effect))| SmoothedState { rho, effect, t: k as f64 * record.dt() })
        .collect())
}

/// Verify Σ Ω†Ω = I and return the worst deviation.
fn completeness_deviation(povm: &[Mat2]) -> f64 {
    let mut sum = Mat2::diagonal(0.0, 0.0);
    for op in povm {
        sum = sum.add(&op.adjoint().mul(op));
    }
    sum.max_deviation(&Mat2::identity())
}

/// Prediction for a hidden measurement performed between the records that
/// produced `rho` and `effect`. Probabilities are nonnegative and sum to 1.
pub fn predict_hidden(
    rho: &HermitianMatrix2,
    effect: &HermitianMatrix2,
    povm: &[Mat2],
) -> Result<Vec<f64>> {
    if povm.is_empty() {
        return Err(Error::IncompletePovm(1.0));
    }
    let dev = completeness_deviation(povm);
    if dev > 1e-9 {
        return Err(Error::IncompletePovm(dev));
    }
    let e_op = effect.to_operator();
    let mut probs: Vec<f64> = povm
        .iter()
        .map(|op| {
            let post = op.sandwich(rho).to_operator();
            // Tr(Ω ρ Ω† E): both factors Hermitian PSD, trace is real nonnegative
            let t: Complex64 = post.0[0] * e_op.0[0]
                + post.0[1] * e_op.0[2]
                + post.0[2] * e_op.0[1]
                + post.0[3] * e_op.0[3];
            t.re.max(0.0)
        })
        .collect();
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::ZeroProbability);
    }
    for p in &mut probs {
        *p /= total;
    }
    Ok(probs)
}

/// Discretized weak-measurement POVM built from the Gaussian outcome
/// operators on a uniform grid, weighted so that Σ Ω†Ω ≈ I. Suitable for
/// weak-value studies through `predict_hidden`.
pub fn weak_povm(config: &MeasurementConfig, n_points: usize) -> Result<Vec<Mat2>> {
    if n_points < 2 {
        return Err(Error::Domain("weak POVM needs at least two grid points".into()));
    }
    let a = config.histogram_width();
    let lo = -1.0 - 10.0 * a;
    let hi = 1.0 + 10.0 * a;
    let h = (hi - lo) / (n_points - 1) as f64;
    let norm = (2.0 * std::f64::consts::PI * a * a).powf(-0.25);
    Ok((0..n_points)
        .map(|i| {
            let r = lo + i as f64 * h;
            let trapezoid = if i == 0 || i == n_points - 1 { 0.5 * h } else { h };
            let scale = norm * trapezoid.sqrt();
            let g_ground = (-(r - 1.0) * (r - 1.0) * config.dt / (4.0 * config.tau)).exp();
            let g_excited = (-(r + 1.0) * (r + 1.0) * config.dt / (4.0 * config.tau)).exp();
            Mat2::diagonal(scale * g_ground, scale * g_excited)
        })
        .collect())
}

/// Outcome of the two-observer game: both observers guess a projective
/// z-result hidden in the middle of a record; one sees only the record
/// before the hidden measurement, the other also sees the record after it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GuessingGameResult {
    pub n_games: usize,
    pub forward_correct: usize,
    pub smoothed_correct: usize,
    /// Games the smoothed observer won and the forward observer lost.
    pub smoothed_only: usize,
    /// Games the forward observer won and the smoothed observer lost.
    pub forward_only: usize,
}

impl GuessingGameResult {
    pub fn forward_accuracy(&self) -> f64 {
        self.forward_correct as f64 / self.n_games as f64
    }

    pub fn smoothed_accuracy(&self) -> f64 {
        self.smoothed_correct as f64 / self.n_games as f64
    }
}

/// Play `n_games` hidden-measurement games. Each game simulates a pure-state
/// record of `n_steps`, interrupts it at `hidden_step` with a projective
/// z-measurement whose result is hidden, and lets both observers guess.
/// The physical state coincides with the filter state, so the config should
/// describe an ideal chain (η_m = 1, no extra dephasing).
pub fn guessing_game(
    config: &MeasurementConfig,
    n_steps: usize,
    hidden_step: usize,
    initial_state: BlochVector,
    n_games: usize,
    seed: u64,
) -> Result<GuessingGameResult> {
    check_z_axis(config)?;
    if hidden_step == 0 || hidden_step >= n_steps {
        return Err(Error::Domain(
            "hidden_step must lie strictly inside the record".into(),
        ));
    }
    if n_games == 0 {
        return Err(Error::Domain("n_games must be at least 1".into()));
    }

    let width = config.histogram_width();
    let povm = projective_z_effects();

    let tallies: Vec<Result<(bool, bool)>> = (0..n_games as u64)
        .into_par_iter()
        .map(|game| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(game);

            // past record, conditioning both observers
            let mut q = initial_state;
            for _ in 0..hidden_step {
                let r = sample_z_outcome(q, width, &mut rng);
                q = crate::generator::step_state(q, r, config);
            }
            let q_before = q;

            // hidden projective measurement collapses the true state
            let hidden_plus = rng.random::<f64>() < 0.5 * (1.0 + q.z);
            q = if hidden_plus { BlochVector::GROUND } else { BlochVector::EXCITED };

            // future record, seen only by the smoothed observer
            let mut future = Vec::with_capacity(n_steps - hidden_step);
            for _ in hidden_step..n_steps {
                let r = sample_z_outcome(q, width, &mut rng);
                future.push(r);
                q = crate::generator::step_state(q, r, config);
            }

            let forward_guess_plus = q_before.z >= 0.0;

            let record = MeasurementRecord::new(future, config.dt, seed, config.axis)?;
            let effect = backward_effects(&record, config)?[0];
            let rho = HermitianMatrix2::from_bloch(q_before);
            let probs = predict_hidden(&rho, &effect, &povm)?;
            let smoothed_guess_plus = probs[0] >= probs[1];

            Ok((forward_guess_plus == hidden_plus, smoothed_guess_plus == hidden_plus))
        })
        .collect();

    let mut result = GuessingGameResult {
        n_games,
        forward_correct: 0,
        smoothed_correct: 0,
        smoothed_only: 0,
        forward_only: 0,
    };
    for tally in tallies {
        let (forward_ok, smoothed_ok) = tally?;
        result.forward_correct += forward_ok as usize;
        result.smoothed_correct += smoothed_ok as usize;
        result.smoothed_only += (smoothed_ok && !forward_ok) as usize;
        result.forward_only += (forward_ok && !smoothed_ok) as usize;
    }
    Ok(result)
}
