use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Validation(ValidationReport),

    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("full free-space Green's tensor requested at coincident points")]
    CoincidentPointsFullTensor,

    #[error("quadrature did not converge: estimated error {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("frequency grid [{omega_min}, {omega_max}] does not enclose the resonance at {omega}")]
    GridDoesNotEncloseResonance {
        omega: f64,
        omega_min: f64,
        omega_max: f64,
    },

    #[error("spectral tail not converged: tail {tail:.3e} vs result {value:.3e}")]
    TailNotConverged { tail: f64, value: f64 },

    #[error("frequency grid too coarse: spacing {spacing:.3e} eV cannot resolve memory time {tau_max:.3e}")]
    SpectralGridTooCoarse { spacing: f64, tau_max: f64 },

    #[error("memory kernel ({alpha},{beta}) does not decay within the memory window")]
    NoDecayDetected { alpha: usize, beta: usize },

    #[error("corrector rejected step {step} at t = {time}: residual {residual:.3e}; reduce dt")]
    StepRejected {
        step: usize,
        time: f64,
        residual: f64,
    },

    #[error("non-finite amplitude at step {0}")]
    NonFiniteAmplitude(usize),

    #[error("refinement sweep not converging: deviations {0:?}")]
    NotConverging(Vec<f64>),

    #[error("spectral matrix not positive semidefinite at {omega} eV (min eigenvalue {min_eigenvalue:.3e})")]
    NonPsdSpectralMatrix { omega: f64, min_eigenvalue: f64 },

    #[error("t_max = {t_max} exceeds the pseudomode recurrence time {recurrence}")]
    RecurrenceHorizonExceeded { t_max: f64, recurrence: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

impl From<ValidationReport> for Error {
    fn from(r: ValidationReport) -> Self {
        Error::Validation(r)
    }
}
