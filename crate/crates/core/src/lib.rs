//! Holevo Cramér-Rao bounds for joint quadrature displacement estimation
//! with n-mode Gaussian probes.
//!
//! The crate computes the bound three ways and cross-checks them:
//!
//! * [`holevo_sdp`] — exact semidefinite programming over the feasible
//!   operators of the Gaussian mean-estimation problem, with primal/dual
//!   certificates verified through strong duality,
//! * [`closed_form`] — analytic expressions for the symmetric two-mode
//!   squeezed thermal probe, including the full certificate family,
//! * [`montecarlo_sim`] — Gaussian-level simulation of the optical circuits
//!   that attain the bound.
//!
//! [`gaussian_model`] holds the probe representation and the orthonormal
//! frame data everything else consumes; [`fisher_bounds`] adds the SLD/RLD
//! Cramér-Rao bounds for comparison; [`optimal_measurement`] turns SDP
//! optimizers into measurement plans.
//!
//! Conventions: quadrature ordering is (y₁, x₁, …, yₙ, xₙ) with [Q, P] = i
//! and vacuum variance 1/2.

mod accum;
pub mod closed_form;
pub mod error;
pub mod fisher_bounds;
pub mod gaussian_model;
pub mod holevo_sdp;
mod ipm;
pub mod montecarlo_sim;
pub mod optimal_measurement;

pub use error::{Error, Result};
pub use gaussian_model::{
    duan_sum, is_entangled, omega, orthonormal_frame, orthonormal_frame_with_basis,
    symmetric_tmst_probe, symplectic_form, EuclideanFrame, ProbeModel,
};
pub use holevo_sdp::{
    build_sdp, holevo_bound, holevo_bound_model, realify, solve, verify_certificate, BlockMatrix,
    BoundResult, CertificateReport, SdpProblem, SdpSolution,
};
pub use closed_form::{c0_max, holevo_bound_closed, threshold_r0, ClosedFormSolution, Regime};
pub use fisher_bounds::{fisher_bounds, rld_bound, sld_bound, trabs, FisherResult};
pub use montecarlo_sim::{beam_splitter_symplectic, simulate, CircuitSpec, Scheme, SimulationResult};
pub use optimal_measurement::{
    achieved_mse, circuit_params, extract_plan, optimal_t, Circuit, MeasurementPlan, MseBreakdown,
};
