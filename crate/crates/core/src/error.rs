use thiserror::Error;

/// Errors raised by the geometric and spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid curvature label {0}; expected one of 0, 1, -1")]
    InvalidCurvature(i64),

    #[error("matrix is not in the Lie algebra of G_{k}: defect {defect:.3e}")]
    NotInAlgebra { k: i8, defect: f64 },

    #[error("matrix is not in G_{k}: {reason}")]
    NotInGroup { k: i8, reason: String },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("pitch lambda = {lambda} is degenerate for k = {k} (lambda^2 = k)")]
    DegenerateScrew { k: i8, lambda: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("generator does not have unit speed (|V e0| = {speed})")]
    NotUnitSpeed { speed: f64 },

    #[error("curve is not horizontal: residual {residual:.3e} at t = {t}")]
    NotHorizontal { residual: f64, t: f64 },

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("inconsistent witness: {0}")]
    InconsistentWitness(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
