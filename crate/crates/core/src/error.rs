//! Error types shared across the crate.

use crate::holevo_sdp::SdpSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or inconsistent input (shapes, ranges, file contents).
    #[error("input error: {0}")]
    Input(String),

    /// Data that parses but does not describe a valid quantum state.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A parameter is not imprinted independently (rank-deficient mean map).
    #[error("unidentifiable parameters: {0}")]
    Unidentifiable(String),

    /// Numerical failure outside the solver (singular systems, eigensolver).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The SDP solver exhausted its iteration budget. Carries the best
    /// iterate found and its feasibility residuals.
    #[error(
        "solver did not converge after {iterations} iterations \
         (gap {gap:.3e}, primal residual {primal_residual:.3e}, dual residual {dual_residual:.3e})"
    )]
    Convergence {
        iterations: usize,
        gap: f64,
        primal_residual: f64,
        dual_residual: f64,
        best: Box<SdpSolution>,
    },

    /// The optimizer produced a singular reduced matrix; no estimator
    /// vectors can be extracted from it.
    #[error("degenerate optimizer: {0}")]
    DegenerateOptimizer(String),

    /// A measurement plan violated the unbiasedness contract.
    #[error("biased plan: {0}")]
    BiasedPlan(String),
}
