use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, run or solver configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A parameter outside its mathematical domain (fractional order, soliton velocity).
    #[error("domain error: {0}")]
    Domain(String),

    /// Fields or operators built on different grids, or buffers of the wrong length.
    #[error("shape error: {0}")]
    Shape(String),

    #[error("operation supports only 1D grids, got dimension {0}")]
    UnsupportedDimension(usize),

    /// `a + b * lambda` vanished for some mode of a shifted solve.
    #[error("singular shifted operator at mode {mode} (denominator {denominator:e})")]
    Singular { mode: usize, denominator: f64 },

    /// Non-finite or otherwise unusable input samples.
    #[error("input error: {0}")]
    Input(String),

    /// Fixed-point iteration of an implicit step hit its iteration cap.
    #[error("implicit solve did not converge after {iterations} sweeps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    /// A step failure inside a time loop.
    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Residual carried by a convergence failure, if any.
    pub fn residual(&self) -> Option<f64> {
        match self {
            Error::NotConverged { residual, .. } => Some(*residual),
            Error::StepFailed { source, .. } => source.residual(),
            _ => None,
        }
    }
}
