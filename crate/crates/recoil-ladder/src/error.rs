//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong while building ladders or evolving states.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar input is outside the mathematical domain of the operation.
    Domain {
        what: &'static str,
        value: f64,
    },
    /// A configuration violates one of its invariants.
    Config(String),
    /// Phase matching would require a non-positive photon momentum.
    InfeasiblePhaseMatching {
        photon_momentum: f64,
    },
    /// State and operator (or reference) do not live on the same ladder.
    ShapeMismatch {
        expected: usize,
        found: usize,
    },
    /// Probability reached the truncation boundary of the ladder.
    TruncationOverflow {
        boundary_population: f64,
        n_max: u32,
    },
    /// Adaptive truncation hit the hard cap before the tail converged.
    TruncationNotConverged {
        n_max_cap: u32,
    },
    /// The eigensolver did not converge.
    EigenFailure {
        dim: usize,
    },
    /// The adaptive integrator exceeded its step budget.
    OdeStepLimit {
        steps: usize,
    },
    /// The series oracle was handed a matrix too large for its scaling budget.
    OracleNormTooLarge {
        norm: f64,
    },
    /// Two-photon reduction requested with a resonant (zero) one-photon mismatch.
    ZeroMismatch,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => {
                write!(f, "domain error: {what} = {value} is not admissible")
            }
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InfeasiblePhaseMatching { photon_momentum } => write!(
                f,
                "infeasible phase matching: photon momentum {photon_momentum} rad/um is not positive"
            ),
            Error::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected} levels, found {found}")
            }
            Error::TruncationOverflow {
                boundary_population,
                n_max,
            } => write!(
                f,
                "truncation overflow: boundary population {boundary_population:.3e} at n_max = {n_max}; increase the truncation"
            ),
            Error::TruncationNotConverged { n_max_cap } => {
                write!(f, "adaptive truncation did not converge below n_max = {n_max_cap}")
            }
            Error::EigenFailure { dim } => {
                write!(f, "eigensolver failed to converge on a {dim}x{dim} matrix")
            }
            Error::OdeStepLimit { steps } => {
                write!(f, "adaptive integrator exceeded {steps} steps")
            }
            Error::OracleNormTooLarge { norm } => {
                write!(f, "oracle error: scaled norm {norm:.3e} exceeds the series budget")
            }
            Error::ZeroMismatch => write!(
                f,
                "two-photon reduction is invalid at zero one-photon mismatch (resonant case)"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
