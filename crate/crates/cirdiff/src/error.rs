//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, curve building, calibration,
/// simulation and pricing.
#[derive(Debug, Error)]
pub enum CirError {
    /// y-leg requires k^2 >= 2 sigma^2 so that phi1 stays real.
    #[error("negative discriminant for y leg: k^2 - 2*sigma^2 = {0:e}")]
    NegativeDiscriminant(f64),

    /// sigma below the working floor; phi3 = 2*k*theta/sigma^2 is undefined.
    #[error("sigma = {0:e} is below the 1e-8 floor; phi3 is undefined")]
    DegenerateSigma(f64),

    #[error("invalid phi triple: {0}")]
    InvalidPhi(String),

    #[error("invalid CIR parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input data (quotes, config, market files).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("bootstrap failed: {0}")]
    Bootstrap(String),

    #[error("no extrapolation: T = {t} beyond last pillar {max}")]
    Extrapolation { t: f64, max: f64 },

    /// A requested time does not lie on the simulation grid.
    #[error("grid error: {0}")]
    Grid(String),

    #[error("infeasible calibration guess: {0}")]
    InfeasibleGuess(String),

    #[error("calibration did not converge within {iterations} iterations (best objective {objective:e})")]
    NonConvergence { iterations: usize, objective: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CirError {
    /// Process exit code for the CLI: 2 for input/config problems,
    /// 1 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CirError::Bootstrap(_) | CirError::NonConvergence { .. } => 1,
            CirError::NegativeDiscriminant(_)
            | CirError::DegenerateSigma(_)
            | CirError::InvalidPhi(_)
            | CirError::InvalidParams(_)
            | CirError::Domain(_)
            | CirError::Validation(_)
            | CirError::Parse { .. }
            | CirError::Extrapolation { .. }
            | CirError::Grid(_)
            | CirError::InfeasibleGuess(_)
            | CirError::Io(_)
            | CirError::Json(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CirError>;
