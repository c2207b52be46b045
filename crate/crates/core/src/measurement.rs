//! Single-step measurement backaction.
//!
//! A step of duration Δt with outcome r multiplies the population odds by
//! exp(−2rΔt/τ), which for the z-component reads
//!
//!   z' = (z + tanh m) / (1 + z·tanh m),   m = rΔt/τ,
//!
//! while the equatorial coherence is rescaled so a pure state stays pure and
//! damped by exp(−γΔt) for the record information the observer never sees.
//! A φ-step instead leaves z alone and rotates the equatorial components by
//! the accumulated phase kick −rΔt/τ.

use std::f64::consts::TAU as TWO_PI;

use crate::bloch::BlochVector;
use crate::config::{MeasurementAxis, MeasurementConfig};

/// σ_z eigenstate labels. `Ground` (|0⟩, z = +1) centers the outcome
/// histogram at r = +1, `Excited` at r = −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pole {
    Ground,
    Excited,
}

impl Pole {
    pub fn sign(self) -> f64 {
        match self {
            Pole::Ground => 1.0,
            Pole::Excited => -1.0,
        }
    }
}

fn gaussian_density(r: f64, center: f64, variance: f64) -> f64 {
    (TWO_PI * variance).sqrt().recip() * (-(r - center) * (r - center) / (2.0 * variance)).exp()
}

/// Probability density of outcome r given a σ_z eigenstate: a Gaussian of
/// standard deviation a = √(τ/Δt) centered on the eigenvalue. Integrates to
/// one over r for either pole.
pub fn povm_weight(r: f64, eigen: Pole, config: &MeasurementConfig) -> f64 {
    let variance = config.tau / config.dt;
    gaussian_density(r, eigen.sign(), variance)
}

/// Outcome density for an arbitrary state: the population-weighted mixture of
/// the two pole histograms for a z-measurement, and a state-independent
/// zero-centered Gaussian for a φ-measurement.
pub fn marginal_density(q: BlochVector, r: f64, config: &MeasurementConfig) -> f64 {
    match config.axis {
        MeasurementAxis::Z => {
            let p_ground = 0.5 * (1.0 + q.z);
            let p_excited = 0.5 * (1.0 - q.z);
            p_ground * povm_weight(r, Pole::Ground, config)
                + p_excited * povm_weight(r, Pole::Excited, config)
        }
        MeasurementAxis::Phi => gaussian_density(r, 0.0, config.tau / config.dt),
    }
}

/// Conditioned state after a z-measurement step with outcome r.
///
/// Poles are exact fixed points: the measurement is QND on eigenstates.
pub fn update_z(q: BlochVector, r: f64, config: &MeasurementConfig) -> BlochVector {
    if q.z >= 1.0 {
        return BlochVector::GROUND;
    }
    if q.z <= -1.0 {
        return BlochVector::EXCITED;
    }

    let m = r * config.dt / config.tau;
    let t = m.tanh();
    // Log-odds shift in closed form; saturates instead of overflowing.
    let z_new = (q.z + t) / (1.0 + q.z * t);

    let c = q.coherence();
    if c == 0.0 {
        return BlochVector { x: 0.0, y: 0.0, z: z_new };
    }

    // c' = c·e^(−γΔt) / (cosh m + z·sinh m), the likelihood geometric mean
    // over the marginal. Evaluated in the log domain so strong kicks neither
    // overflow nor cancel. The azimuthal phase is untouched, and since
    // 1 − z'² = (1 − z²)/(cosh m + z·sinh m)², pure states stay pure.
    let sign = if m >= 0.0 { 1.0 } else { -1.0 };
    let ln_divisor = m.abs()
        + (0.5 * (1.0 + sign * q.z) + 0.5 * (1.0 - sign * q.z) * (-2.0 * m.abs()).exp()).ln();
    let scale = (-config.gamma * config.dt - ln_divisor).exp();
    BlochVector { x: q.x * scale, y: q.y * scale, z: z_new }
}

/// Conditioned state after a φ-measurement step with outcome r: z is
/// untouched, the equator rotates by −rΔt/τ and shrinks by exp(−γΔt).
pub fn update_phi(q: BlochVector, r: f64, config: &MeasurementConfig) -> BlochVector {
    let phase = r * config.dt / config.tau;
    let (s, c) = phase.sin_cos();
    let decay = (-config.gamma * config.dt).exp();
    BlochVector {
        x: (q.x * c + q.y * s) * decay,
        y: (-q.x * s + q.y * c) * decay,
        z: q.z,
    }
}

/// Measurement update along the configured axis.
pub fn bayes_update(q: BlochVector, r: f64, config: &MeasurementConfig) -> BlochVector {
    match config.axis {
        MeasurementAxis::Z => update_z(q, r, config),
        MeasurementAxis::Phi => update_phi(q, r, config),
    }
}

/// Rotation about the y axis by `theta`: (x, z) → (x·cosθ + z·sinθ,
/// z·cosθ − x·sinθ). Positive θ carries +z toward +x; flip the sign of θ
/// for the opposite convention.
pub fn rabi_rotate(q: BlochVector, theta: f64) -> BlochVector {
    let (s, c) = theta.sin_cos();
    BlochVector { x: q.x * c + q.z * s, y: q.y, z: q.z * c - q.x * s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::MeasurementConfig;

    /// τ = 600 ns, Δt = 400 ns, lossy collection: γ = 1.3e6 s⁻¹.
    fn lossy_config() -> MeasurementConfig {
        MeasurementConfig::from_projection_time(600e-9, 0.4, 400e-9, 20e-6, 0.0, MeasurementAxis::Z)
            .unwrap()
    }

    /// Same timescales with nothing lost: γ = 0.
    fn ideal_config() -> MeasurementConfig {
        MeasurementConfig::from_projection_time(
            600e-9,
            1.0,
            400e-9,
            f64::INFINITY,
            0.0,
            MeasurementAxis::Z,
        )
        .unwrap()
    }

    /// Unit-width histograms: τ = Δt so a = 1.
    fn unit_width_config() -> MeasurementConfig {
        MeasurementConfig::from_projection_time(
            400e-9,
            1.0,
            400e-9,
            f64::INFINITY,
            0.0,
            MeasurementAxis::Z,
        )
        .unwrap()
    }

    #[test]
    fn povm_weight_gaussian_values() {
        let cfg = unit_width_config();
        // peak of a unit-width Gaussian
        let peak = povm_weight(1.0, Pole::Ground, &cfg);
        assert!((peak - 0.3989422804014327).abs() < 1e-15);
        // two standard deviations out
        let wing = povm_weight(-1.0, Pole::Ground, &cfg);
        assert!((wing - 0.3989422804014327 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((wing - 0.05399096651318806).abs() < 1e-12);
    }

    #[test]
    fn povm_weight_normalized_by_quadrature() {
        // Trapezoid oracle over ±14 standard deviations.
        let cfg = lossy_config();
        let a = cfg.histogram_width();
        let n = 40_001;
        let lo = 1.0 - 14.0 * a;
        let hi = 1.0 + 14.0 * a;
        let h = (hi - lo) / (n - 1) as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let r = lo + i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            sum += w * povm_weight(r, Pole::Ground, &cfg);
        }
        assert!((sum * h - 1.0).abs() < 1e-9);
    }

    #[test]
    fn update_z_from_equator_is_tanh() {
        let cfg = lossy_config();
        let q = update_z(BlochVector::PLUS_X, 1.5, &cfg);
        // m = 1.5 * 400/600 = 1
        assert!((q.z - 1.0f64.tanh()).abs() < 1e-15);
        assert!((q.z - 0.7615941559557649).abs() < 1e-12);
    }

    #[test]
    fn update_z_null_result_only_dephases() {
        let cfg = lossy_config();
        let q = update_z(BlochVector::PLUS_X, 0.0, &cfg);
        let expected = (-cfg.gamma * cfg.dt).exp(); // exp(-0.52)
        assert!((cfg.gamma * cfg.dt - 0.52).abs() < 1e-12);
        assert!((q.x - expected).abs() < 1e-15);
        assert_eq!(q.y, 0.0);
        assert_eq!(q.z, 0.0);
    }

    #[test]
    fn update_z_pole_fixed_points() {
        let cfg = lossy_config();
        for r in [-50.0, -1.0, 0.0, 2.0, 75.0] {
            assert_eq!(update_z(BlochVector::GROUND, r, &cfg), BlochVector::GROUND);
            assert_eq!(update_z(BlochVector::EXCITED, r, &cfg), BlochVector::EXCITED);
        }
    }

    #[test]
    fn update_z_preserves_purity_without_loss() {
        let cfg = ideal_config();
        for z in [-0.9f64, -0.5, 0.0, 0.3, 0.99] {
            let c = (1.0 - z * z).sqrt();
            for phi in [0.0f64, 1.0, 2.5] {
                let q = BlochVector { x: c * phi.cos(), y: c * phi.sin(), z };
                for r in [-4.0, -0.7, 0.0, 0.2, 3.0] {
                    let q2 = update_z(q, r, &cfg);
                    assert!((q2.norm() - 1.0).abs() < 1e-12, "purity lost at z={z} r={r}");
                    // azimuthal phase preserved
                    assert!((q2.y.atan2(q2.x) - phi.rem_euclid(TWO_PI)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn update_z_coherence_fraction_never_grows() {
        let cfg = lossy_config();
        for z in [-0.8f64, 0.0, 0.6] {
            for scale in [0.2f64, 0.7, 1.0] {
                let c = scale * (1.0 - z * z).sqrt();
                let q = BlochVector { x: c, y: 0.0, z };
                for r in [-3.0, 0.0, 1.0, 4.0] {
                    let q2 = update_z(q, r, &cfg);
                    assert!(q2.norm_sq() <= 1.0 + 1e-12);
                    let f_before = c / (1.0 - z * z).sqrt();
                    let f_after = q2.coherence() / (1.0 - q2.z * q2.z).sqrt();
                    assert!(f_after <= f_before + 1e-12);
                }
            }
        }
    }

    #[test]
    fn update_z_saturated_outcome_is_finite() {
        // strong enough that tanh rounds to exactly ±1
        let cfg = lossy_config();
        let q = update_z(BlochVector::PLUS_X, 60.0, &cfg);
        assert!(q.is_valid());
        assert!((q.z - 1.0).abs() < 1e-15);
        let q = update_z(BlochVector { x: 0.1, y: 0.0, z: -0.95 }, 80.0, &cfg);
        assert!(q.is_valid());
    }

    #[test]
    fn update_phi_evaluates_phase_kick() {
        let mut cfg = lossy_config();
        cfg.axis = MeasurementAxis::Phi;
        let q = update_phi(BlochVector::PLUS_X, 1.0, &cfg);
        let decay = (-0.52f64).exp();
        let phase = 2.0f64 / 3.0;
        assert!((q.x - phase.cos() * decay).abs() < 1e-12);
        assert!((q.y - -(phase.sin()) * decay).abs() < 1e-12);
        assert_eq!(q.z, 0.0);
    }

    #[test]
    fn update_phi_trivial_fixed_points() {
        let mut cfg = ideal_config();
        cfg.axis = MeasurementAxis::Phi;
        let q = update_phi(BlochVector::PLUS_X, 0.0, &cfg);
        assert_eq!(q, BlochVector::PLUS_X);
        let q = update_phi(BlochVector::GROUND, 2.7, &cfg);
        assert_eq!(q, BlochVector::GROUND);
    }

    #[test]
    fn update_phi_preserves_z_and_scales_coherence_exactly() {
        let mut cfg = lossy_config();
        cfg.axis = MeasurementAxis::Phi;
        let q = BlochVector { x: 0.3, y: -0.4, z: 0.5 };
        for r in [-2.0, 0.0, 0.9, 5.0] {
            let q2 = update_phi(q, r, &cfg);
            assert_eq!(q2.z, q.z);
            let scale = (-2.0 * cfg.gamma * cfg.dt).exp();
            let before = q.x * q.x + q.y * q.y;
            let after = q2.x * q2.x + q2.y * q2.y;
            assert!((after - before * scale).abs() < 1e-15);
        }
    }

    #[test]
    fn rabi_rotation_conventions() {
        let q = rabi_rotate(BlochVector::GROUND, std::f64::consts::FRAC_PI_2);
        assert!((q.x - 1.0).abs() < 1e-12 && q.z.abs() < 1e-12);

        let q = rabi_rotate(BlochVector::PLUS_X, TWO_PI);
        assert!((q.x - 1.0).abs() < 1e-12 && q.z.abs() < 1e-12);

        let q = rabi_rotate(BlochVector { x: 0.6, y: 0.0, z: 0.8 }, 0.3);
        let expect_x = 0.6 * 0.3f64.cos() + 0.8 * 0.3f64.sin();
        let expect_z = 0.8 * 0.3f64.cos() - 0.6 * 0.3f64.sin();
        assert!((q.x - expect_x).abs() < 1e-15);
        assert!((q.z - expect_z).abs() < 1e-15);
        assert!((q.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn marginal_density_mixture() {
        let cfg = unit_width_config();
        // equator: equal mixture of the two unit Gaussians at r = 0
        let d = marginal_density(BlochVector::PLUS_X, 0.0, &cfg);
        let expected = 0.3989422804014327 * (-0.5f64).exp();
        assert!((d - expected).abs() < 1e-15);
        assert!((d - 0.24197072451914337).abs() < 1e-12);
        // pole: reduces exactly to the single-pole histogram
        for r in [-2.0, 0.0, 0.4, 3.0] {
            assert_eq!(
                marginal_density(BlochVector::GROUND, r, &cfg),
                povm_weight(r, Pole::Ground, &cfg)
            );
        }
    }

    #[test]
    fn marginal_density_phi_is_state_independent() {
        let mut cfg = unit_width_config();
        cfg.axis = MeasurementAxis::Phi;
        for r in [-1.0, 0.0, 2.0] {
            let a = marginal_density(BlochVector::PLUS_X, r, &cfg);
            let b = marginal_density(BlochVector::GROUND, r, &cfg);
            assert_eq!(a, b);
        }
    }

    /// Trapezoid expectation of `f` under the outcome mixture for state `q`.
    fn outcome_expectation(
        q: BlochVector,
        cfg: &MeasurementConfig,
        f: impl Fn(f64) -> f64,
    ) -> f64 {
        let a = cfg.histogram_width();
        let n = 8001;
        let lo = -1.0 - 12.0 * a;
        let hi = 1.0 + 12.0 * a;
        let h = (hi - lo) / (n - 1) as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let r = lo + i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            sum += w * marginal_density(q, r, cfg) * f(r);
        }
        sum * h
    }

    #[test]
    fn marginal_mean_equals_z() {
        let cfg = lossy_config();
        for z in [-0.9, -0.2, 0.0, 0.5, 1.0] {
            let q = BlochVector { x: 0.0, y: 0.0, z };
            let mean = outcome_expectation(q, &cfg, |r| r);
            assert!((mean - z).abs() < 1e-9, "mean {mean} vs z {z}");
            let norm = outcome_expectation(q, &cfg, |_| 1.0);
            assert!((norm - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn conditioned_z_is_a_martingale() {
        // E[z'] = z under the outcome mixture, for weak through strong steps.
        for ratio in [0.1, 0.5, 1.0, 4.0, 10.0] {
            let cfg = MeasurementConfig::from_projection_time(
                1e-6,
                1.0,
                ratio * 1e-6,
                f64::INFINITY,
                0.0,
                MeasurementAxis::Z,
            )
            .unwrap();
            for z in [-0.95, -0.4, 0.0, 0.3, 0.8] {
                let q = BlochVector { x: 0.0, y: 0.0, z };
                let mean = outcome_expectation(q, &cfg, |r| update_z(q, r, &cfg).z);
                assert!(
                    (mean - z).abs() < 1e-9,
                    "martingale broken at z={z}, dt/tau={ratio}: {mean}"
                );
            }
        }
    }

    #[test]
    fn updates_compose_through_the_averaged_record() {
        // One step of 2Δt with outcome (r1+r2)/2 equals the two Δt steps.
        let cfg = ideal_config();
        let double = cfg.rescaled_dt(2.0 * cfg.dt).unwrap();
        for (r1, r2) in [(0.3, 0.3), (-1.2, 0.8), (2.0, -0.4)] {
            let q0 = BlochVector { x: 0.36, y: 0.48, z: 0.6 };
            let two_steps = update_z(update_z(q0, r1, &cfg), r2, &cfg);
            let one_step = update_z(q0, 0.5 * (r1 + r2), &double);
            assert!((two_steps.x - one_step.x).abs() < 1e-12);
            assert!((two_steps.y - one_step.y).abs() < 1e-12);
            assert!((two_steps.z - one_step.z).abs() < 1e-12);
        }
    }
}
