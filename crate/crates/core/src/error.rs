use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = StefanError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum StefanError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("mapped mesh folded: triangle {triangle} has signed area {area:e}")]
    FoldedMesh { triangle: usize, area: f64 },

    #[error("degenerate triangle {triangle} (area {area:e})")]
    DegenerateTriangle { triangle: usize, area: f64 },

    #[error("non-positive radius {radius:e} at boundary sample {index}")]
    NonPositiveRadius { index: usize, radius: f64 },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("kernel matrix factorization failed (estimated condition number {condition:e})")]
    KernelFactorization { condition: f64 },

    #[error("source term has no observable effect on the boundary (sum of squared sensitivities {sum:e} below {threshold:e})")]
    DegenerateSensitivity { sum: f64, threshold: f64 },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<StefanError>,
    },

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl StefanError {
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            e @ StefanError::AtStep { .. } => e,
            e => StefanError::AtStep {
                step,
                source: Box::new(e),
            },
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        StefanError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// The innermost error, with any step annotation peeled off.
    pub fn root(&self) -> &StefanError {
        match self {
            StefanError::AtStep { source, .. } => source.root(),
            e => e,
        }
    }
}
