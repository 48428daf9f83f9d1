//! Error conditions shared by all solver modules.

use crate::potential::GridPotential;

/// Failure modes of the solvers and evaluators.
///
/// Solver failures carry enough state to diagnose the run: the grid Newton
/// loop returns its last iterate, the fixed-point loop its residual history.
#[derive(Debug)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    Domain(String),

    /// Invalid or unsupported charge description for the requested operation.
    Charge(String),

    /// Grid/box/potential geometry mismatch.
    Geometry(String),

    /// Damped Newton failed to converge; carries the last iterate.
    Newton {
        message: String,
        last_iterate: Option<Box<GridPotential>>,
    },

    /// Fixed-point iteration failed to converge; carries the residual history.
    FixedPoint {
        message: String,
        residual_history: Vec<f64>,
    },
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Charge(msg) => write!(f, "charge error: {msg}"),
            Error::Geometry(msg) => write!(f, "geometry error: {msg}"),
            Error::Newton { message, .. } => write!(f, "newton error: {message}"),
            Error::FixedPoint {
                message,
                residual_history,
            } => write!(
                f,
                "fixed-point error: {message} (after {} iterations)",
                residual_history.len()
            ),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
