use thiserror::Error;

/// Errors produced by the trajectory engine.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Domain(String),

    /// Generator settings violate a validity bound.
    #[error("invalid generator settings: {0}")]
    Settings(String),

    /// The sequential two-step update requires a small Rabi angle per step.
    #[error("Rabi angle per step is {0:.4} rad; the two-step update requires <= 0.1 rad")]
    TwoStepValidity(f64),

    /// A measurement outcome was assigned vanishing probability.
    #[error("measurement outcome has vanishing probability (trace underflow)")]
    ZeroProbability,

    /// The supplied effect operators do not resolve the identity.
    #[error("POVM set incomplete: sum of effects deviates from identity by {0:.3e}")]
    IncompletePovm(f64),

    /// A conditioned sub-ensemble is too small to estimate from.
    #[error("insufficient statistics: conditioned sub-ensemble holds {count} shots")]
    InsufficientStatistics { count: usize },

    /// A requested time does not lie on the trajectory grid.
    #[error("time {t} s is not on the trajectory grid (dt = {dt} s)")]
    OffGrid { t: f64, dt: f64 },

    /// An operation that needs at least one trajectory received none.
    #[error("empty ensemble")]
    EmptyEnsemble,
}

pub type Result<T> = std::result::Result<T, Error>;
