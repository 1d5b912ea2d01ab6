use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    /// Velocity magnitude reached the lattice sound speed; the flow is
    /// under-resolved at the chosen grid/viscosity.
    #[error("velocity magnitude {mag:.6e} exceeds the stability limit c_s = {cs:.6e}")]
    VelocityLimit { mag: f64, cs: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("numerical instability detected at step {step}")]
    Instability { step: u64 },

    #[error("{0}")]
    OutOfRange(String),

    #[error("fit error: {0}")]
    Fit(String),

    /// Nonlinear fit ran out of iteration budget. Carries the best
    /// parameter set found so far.
    #[error("fit did not converge after {iters} iterations (best residual {residual:.3e})")]
    FitDidNotConverge {
        iters: usize,
        residual: f64,
        best: Box<crate::analysis::BarreeConwayFit>,
    },

    #[error("series is not converged: {0}")]
    NotConverged(String),

    #[error("invalid file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
