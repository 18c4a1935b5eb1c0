use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mask construction: {0}")]
    MaskConstruction(String),

    #[error("solver diverged at iteration {iteration}: {reason}")]
    Diverged {
        iteration: usize,
        reason: String,
        /// Energies of the accepted iterates up to the failure.
        energy_trace: Vec<f64>,
    },

    #[error(
        "clearing-out violated: sample {sample} has e = {value:.6e} > eps but its 2-ball carries only {local_energy:.6e} < mu = {mu:.6e}"
    )]
    ClearingOutViolated {
        sample: usize,
        value: f64,
        local_energy: f64,
        mu: f64,
    },

    #[error("field is not a solution: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotASolution { residual: f64, tol: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
