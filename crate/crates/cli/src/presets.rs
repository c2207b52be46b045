//! Named experiment presets covering the regimes the engine is built for.
//! Each resolves to an exact parameter set; `--steps`, `--axis` and config
//! overrides still apply on top.

use qtraj_core::bloch::BlochVector;
use qtraj_core::cascade::{CascadeConfig, TwoQubitBayesState};
use qtraj_core::config::{MeasurementAxis, MeasurementConfig};

use crate::config_file::{ResolvedCascade, ResolvedRun};
use crate::error::{CliError, CliErrorKind};

pub const QUBIT_PRESETS: [&str; 5] = ["jump", "diffusive", "conditional", "driven", "undriven"];
pub const CASCADE_PRESETS: [&str; 1] = ["cascade"];

fn timescales(
    tau: f64,
    eta_m: f64,
    dt: f64,
    t2star: f64,
    rabi_hz: f64,
) -> MeasurementConfig {
    MeasurementConfig::from_projection_time(
        tau,
        eta_m,
        dt,
        t2star,
        2.0 * std::f64::consts::PI * rabi_hz,
        MeasurementAxis::Z,
    )
    .expect("preset parameters are valid")
}

/// Resolve a single-qubit preset by name.
pub fn qubit_preset(name: &str) -> Result<ResolvedRun, CliError> {
    let run = match name {
        // Strong measurement binned into near-projective samples, with a
        // Rabi drive supplying the jumps. Δt = 4τ.
        "jump" => ResolvedRun {
            config: timescales(50e-9, 1.0, 200e-9, f64::INFINITY, 8e6),
            n_steps: 250,
            substeps_per_dt: 128,
            t1: None,
            initial_state: BlochVector::GROUND,
        },
        // Weak sampling of a slow projection: the diffusive regime. Δt ≪ τ.
        "diffusive" => ResolvedRun {
            config: timescales(150e-9, 1.0, 20e-9, f64::INFINITY, 0.0),
            n_steps: 150,
            substeps_per_dt: 2,
            t1: None,
            initial_state: BlochVector::PLUS_X,
        },
        // Single partial measurement with a lossy chain: γ = 1.3e6 s⁻¹.
        "conditional" => ResolvedRun {
            config: timescales(600e-9, 0.4, 400e-9, 20e-6, 0.0),
            n_steps: 1,
            substeps_per_dt: 1,
            t1: None,
            initial_state: BlochVector::PLUS_X,
        },
        // Simultaneous weak measurement and slow Rabi drive over 2 µs.
        "driven" => ResolvedRun {
            config: timescales(1.28e-6, 0.4, 20e-9, 20e-6, 0.4e6),
            n_steps: 100,
            substeps_per_dt: 1,
            t1: None,
            initial_state: BlochVector::PLUS_X,
        },
        // The same timescales without the drive.
        "undriven" => ResolvedRun {
            config: timescales(1.28e-6, 0.4, 20e-9, 20e-6, 0.0),
            n_steps: 100,
            substeps_per_dt: 1,
            t1: None,
            initial_state: BlochVector::PLUS_X,
        },
        other => {
            return Err(CliError::new(
                CliErrorKind::Config,
                format!("unknown preset {other:?}; qubit presets: {}", QUBIT_PRESETS.join(", ")),
            ))
        }
    };
    Ok(run)
}

/// Resolve a two-qubit cascade preset by name.
pub fn cascade_preset(name: &str) -> Result<ResolvedCascade, CliError> {
    match name {
        // Half-parity probe of two qubits prepared in the product
        // superposition; 16 steps reach the conditional-state time 0.8 µs.
        "cascade" => Ok(ResolvedCascade {
            config: CascadeConfig::new(0.75e-6, 50e-9, 1.0, [0.0; 6])
                .expect("preset parameters are valid"),
            n_steps: 16,
            initial: TwoQubitBayesState::product_superposition(),
            initial_label: "product".into(),
        }),
        other => Err(CliError::new(
            CliErrorKind::Config,
            format!("unknown preset {other:?}; cascade presets: {}", CASCADE_PRESETS.join(", ")),
        )),
    }
}
