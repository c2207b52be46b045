//! Measurement parameterization for a dispersively read-out qubit.
//!
//! All times are stored in seconds, all rates in s⁻¹, and Rabi drive as an
//! angular frequency in rad/s. The per-step measurement strength is
//! S = 64·(χ/κ)²·κ·n̄·η_m·Δt, the projection timescale is τ = 4Δt/S, the
//! measurement dephasing rate is Γ = 8·(χ/κ)²·κ·n̄, and the residual
//! dephasing seen by the observer is γ = Γ·(1 − η_m) + 1/T2*.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which field quadrature is amplified, i.e. which backaction the record drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementAxis {
    /// Informational quadrature: record drives the state along meridians.
    Z,
    /// Photon-number quadrature: record diffuses the superposition phase.
    Phi,
}

/// Cavity phase contrast between the two qubit states, 4·|χ|/κ.
pub fn dispersive_phase_shift(chi_over_kappa: f64) -> f64 {
    4.0 * chi_over_kappa
}

/// Immutable bundle of physical and derived measurement parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    /// Dispersive shift over cavity linewidth, |χ|/κ.
    pub chi_over_kappa: f64,
    /// Mean intracavity photon number of the probe tone.
    pub nbar: f64,
    /// Quantum efficiency of the detection chain, in (0, 1].
    pub eta_m: f64,
    /// Cavity decay rate, s⁻¹.
    pub kappa: f64,
    /// Step duration Δt, s.
    pub dt: f64,
    /// Characteristic projection time τ = 4Δt/S, s.
    pub tau: f64,
    /// Dimensionless per-step measurement strength S.
    pub strength: f64,
    /// Measurement-induced ensemble dephasing rate Γ, s⁻¹.
    pub gamma_meas: f64,
    /// Extra environmental dephasing time T2*, s (may be infinite).
    pub t2star: f64,
    /// Residual dephasing rate γ = Γ(1 − η_m) + 1/T2*, s⁻¹.
    pub gamma: f64,
    /// Rabi angular frequency Ω, rad/s. Positive Ω rotates +z toward +x.
    pub omega: f64,
    /// Amplified quadrature.
    pub axis: MeasurementAxis,
}

/// Reference parameters used when only the projection timescale is specified.
/// Only the product (χ/κ)²·κ·n̄·η_m is physical; these pin a representative
/// operating point in the small phase-shift limit.
const REF_CHI_OVER_KAPPA: f64 = 0.05;
const REF_KAPPA: f64 = 2.0 * std::f64::consts::PI * 1.0e7;

impl MeasurementConfig {
    /// Build a config from the physical probe parameters.
    #[allow(clippy::too_many_arguments)]
    pub fn from_physical(
        chi_over_kappa: f64,
        nbar: f64,
        eta_m: f64,
        kappa: f64,
        dt: f64,
        t2star: f64,
        omega: f64,
        axis: MeasurementAxis,
    ) -> Result<Self> {
        if !(chi_over_kappa > 0.0) || !chi_over_kappa.is_finite() {
            return Err(Error::Domain(format!(
                "chi_over_kappa must be positive, got {chi_over_kappa}"
            )));
        }
        if !(nbar > 0.0) || !nbar.is_finite() {
            return Err(Error::Domain(format!(
                "nbar must be positive (no measurement without probe photons), got {nbar}"
            )));
        }
        if !(eta_m > 0.0 && eta_m <= 1.0) {
            return Err(Error::Domain(format!("eta_m must lie in (0, 1], got {eta_m}")));
        }
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        if !(t2star > 0.0) {
            return Err(Error::Domain(format!("t2star must be positive, got {t2star}")));
        }
        if !omega.is_finite() {
            return Err(Error::Domain(format!("omega must be finite, got {omega}")));
        }

        let ratio_sq = chi_over_kappa * chi_over_kappa;
        let strength = 64.0 * ratio_sq * kappa * nbar * eta_m * dt;
        let tau = 4.0 * dt / strength;
        let gamma_meas = 8.0 * ratio_sq * kappa * nbar;
        let gamma = gamma_meas * (1.0 - eta_m) + 1.0 / t2star;

        let cfg = Self {
            chi_over_kappa,
            nbar,
            eta_m,
            kappa,
            dt,
            tau,
            strength,
            gamma_meas,
            t2star,
            gamma,
            omega,
            axis,
        };
        cfg.check_consistency()?;
        Ok(cfg)
    }

    /// Build a config from the projection timescale τ directly, inverting the
    /// photon number at a reference operating point (χ/κ = 0.05, κ = 2π·10⁷ s⁻¹).
    pub fn from_projection_time(
        tau: f64,
        eta_m: f64,
        dt: f64,
        t2star: f64,
        omega: f64,
        axis: MeasurementAxis,
    ) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        if !(eta_m > 0.0 && eta_m <= 1.0) {
            return Err(Error::Domain(format!("eta_m must lie in (0, 1], got {eta_m}")));
        }
        // τ = 1 / (16 (χ/κ)² κ n̄ η_m)  ⇒  n̄
        let nbar =
            1.0 / (16.0 * REF_CHI_OVER_KAPPA * REF_CHI_OVER_KAPPA * REF_KAPPA * eta_m * tau);
        Self::from_physical(REF_CHI_OVER_KAPPA, nbar, eta_m, REF_KAPPA, dt, t2star, omega, axis)
    }

    /// Same physics at a different step duration. τ, Γ and γ are unchanged;
    /// S rescales linearly with dt.
    pub fn rescaled_dt(&self, dt: f64) -> Result<Self> {
        Self::from_physical(
            self.chi_over_kappa,
            self.nbar,
            self.eta_m,
            self.kappa,
            dt,
            self.t2star,
            self.omega,
            self.axis,
        )
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_axis(mut self, axis: MeasurementAxis) -> Self {
        self.axis = axis;
        self
    }

    /// Pin the residual dephasing rate γ directly, back-solving T2* so the
    /// stored fields stay self-consistent. Fails if `gamma` is below the
    /// floor Γ·(1 − η_m) set by the uncollected measurement photons.
    pub fn with_dephasing_rate(mut self, gamma: f64) -> Result<Self> {
        let floor = self.gamma_meas * (1.0 - self.eta_m);
        if !(gamma >= floor - 1e-12 * floor.max(1.0)) {
            return Err(Error::Domain(format!(
                "gamma = {gamma} s^-1 is below the collection floor {floor} s^-1"
            )));
        }
        let excess = (gamma - floor).max(0.0);
        self.t2star = if excess == 0.0 { f64::INFINITY } else { 1.0 / excess };
        self.gamma = floor + excess;
        Ok(self)
    }

    /// Standard deviation a = √(τ/Δt) of the dimensionless outcome histograms.
    pub fn histogram_width(&self) -> f64 {
        (self.tau / self.dt).sqrt()
    }

    /// Ensemble dephasing rate Γ_ens = 1/(2τη_m) + 1/T2* governing ⟨x(t)⟩.
    pub fn gamma_ensemble(&self) -> f64 {
        self.gamma + 1.0 / (2.0 * self.tau)
    }

    /// Cavity phase contrast 4·|χ|/κ for this config.
    pub fn phase_shift(&self) -> f64 {
        dispersive_phase_shift(self.chi_over_kappa)
    }

    fn check_consistency(&self) -> Result<()> {
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        let ratio_sq = self.chi_over_kappa * self.chi_over_kappa;
        let s = 64.0 * ratio_sq * self.kappa * self.nbar * self.eta_m * self.dt;
        if rel(self.strength, s) > 1e-12 {
            return Err(Error::Domain("stored S is inconsistent".into()));
        }
        if rel(self.tau, 4.0 * self.dt / self.strength) > 1e-12 {
            return Err(Error::Domain("stored tau is inconsistent".into()));
        }
        // 1/(2τ) = η_m·Γ ties the observer's information rate to the dephasing rate.
        if rel(1.0 / (2.0 * self.tau), self.eta_m * self.gamma_meas) > 1e-12 {
            return Err(Error::Domain("tau and gamma_meas are inconsistent".into()));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::Domain("gamma must be nonnegative".into()));
        }
        Ok(())
    }
}
