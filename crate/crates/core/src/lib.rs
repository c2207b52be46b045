//! Simulation engine for continuously monitored superconducting qubits.
//!
//! The crate generates dimensionless weak-measurement records for a
//! dispersively read-out qubit, reconstructs the conditioned quantum
//! trajectory from each record with Bayesian update rules, and layers the
//! machinery built on top of single records: seeded parallel ensembles with
//! greyscale histograms and post-selection, emulated conditional state
//! tomography, time-symmetric (forward/backward) state estimation, and a
//! cascaded two-qubit half-parity measurement with concurrence tracking.
//!
//! All core types are immutable values after construction; the update rules
//! are pure functions, so ensembles parallelize freely. Randomness always
//! flows through counter-seeded ChaCha streams: the same seed reproduces the
//! same records bit for bit, independent of the worker count.

// Guards written as !(x > 0.0) also reject NaN; keep them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod cascade;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod generator;
pub mod matrix;
pub mod measurement;
pub mod record;
pub mod smoothing;
pub mod tomography;

pub use bloch::{BlochVector, Component, Trajectory};
pub use config::{dispersive_phase_shift, MeasurementAxis, MeasurementConfig};
pub use error::{Error, Result};
pub use generator::{generate_record, relax_map, GeneratorSettings};
pub use record::MeasurementRecord;
