//! Estimator vectors extracted from a bound optimizer, their achieved
//! mean-square error, and the optical circuits realizing them.
//!
//! An optimizer 𝔽 maps to estimator observables R(z_j*) through
//! z* = E·𝔽·𝕄ᵀ·F⁻¹ (columns); unbiasedness c_jᵀz_k* = δ_jk holds by
//! construction whenever F = 𝕄𝔽𝕄ᵀ is invertible. The achieved error of a
//! plan is Tr Re Z + TrAbs Im Z with Z_jk = α(z_j, z_k) + (i/2)Δ(z_j, z_k);
//! the TrAbs term is the noise penalty for noncommuting estimators.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher_bounds::trabs_real;
use crate::gaussian_model::{omega, EuclideanFrame, ProbeModel};

/// Tolerance for matching extracted vectors to a known circuit shape.
const CIRCUIT_MATCH_TOL: f64 = 1e-8;

/// Optical realization of a two-parameter symmetric-probe plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Circuit {
    /// 50:50 beam splitter, then Q on one output and P on the other (t = 1).
    DoubleHomodyne,
    /// Each 50:50 output split again with transmission t, Q and P homodyne
    /// on the four ports.
    DoubleUnbalancedHeterodyne { t: f64 },
    /// The matched transmission exceeds 1; no physical beam splitter
    /// realizes the plan.
    Infeasible { t: f64 },
}

/// Linear Gaussian measurement plan: estimator vectors in phase-space
/// coordinates (rows), their commutator matrix, and the achieved error.
#[derive(Debug, Clone, Serialize)]
pub struct MeasurementPlan {
    /// Row j holds z_j* in the (y₁, x₁, …) coordinates.
    pub z_vectors: Vec<Vec<f64>>,
    /// K_jk = Δ(z_j, z_k), antisymmetric.
    pub commutators: Vec<Vec<f64>>,
    pub achieved_mse: f64,
    pub circuit: Option<Circuit>,
}

/// Achieved-error decomposition: classical variance plus noncommutativity
/// penalty.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MseBreakdown {
    pub total: f64,
    pub trace_re: f64,
    pub trabs_im: f64,
}

/// Beam-splitter transmission attaining the bound below threshold:
/// t = (2v·e^{2r} − 1)/(4v·cosh 2r − 2). Exceeds 1 above threshold.
pub fn optimal_t(v: f64, r: f64) -> f64 {
    (2.0 * v * (2.0 * r).exp() - 1.0) / (4.0 * v * (2.0 * r).cosh() - 2.0)
}

/// Extracts the optimal estimator vectors from a feasible optimizer.
pub fn extract_plan(frame: &EuclideanFrame, f_opt: &DMatrix<f64>) -> Result<MeasurementPlan> {
    let d = frame.dim();
    let l = frame.n_params();
    if f_opt.nrows() != d || f_opt.ncols() != d {
        return Err(Error::Input(format!(
            "optimizer must be {d}x{d}, got {}x{}",
            f_opt.nrows(),
            f_opt.ncols()
        )));
    }
    let f_reduced = &frame.m_mat * f_opt * frame.m_mat.transpose();
    let f_inv = f_reduced.clone().try_inverse().ok_or_else(|| {
        Error::DegenerateOptimizer("reduced matrix M F M^T is singular".into())
    })?;

    // e-basis coordinates of the estimator vectors (columns), then
    // phase-space coordinates
    let u = f_opt * frame.m_mat.transpose() * &f_inv;
    let z = &frame.basis * &u;

    let commutators_mat = u.transpose() * &frame.d_mat * &u;
    let re_z = u.transpose() * &u;
    let im_z = 0.5 * &commutators_mat;
    let achieved_mse = re_z.trace() + trabs_real(&im_z)?;

    let z_vectors: Vec<Vec<f64>> =
        (0..l).map(|j| z.column(j).iter().copied().collect()).collect();
    let commutators: Vec<Vec<f64>> = (0..l)
        .map(|j| (0..l).map(|k| commutators_mat[(j, k)]).collect())
        .collect();

    let mut plan = MeasurementPlan { z_vectors, commutators, achieved_mse, circuit: None };
    plan.circuit = circuit_params(&plan);
    Ok(plan)
}

/// Achieved error of an arbitrary plan evaluated against a probe model,
/// with its decomposition. Rejects biased plans.
pub fn achieved_mse(plan: &MeasurementPlan, model: &ProbeModel) -> Result<MseBreakdown> {
    let d = 2 * model.n_modes();
    let l = model.n_params();
    if plan.z_vectors.len() != l || plan.z_vectors.iter().any(|z| z.len() != d) {
        return Err(Error::Input(format!(
            "plan has {} vectors of mixed length, expected {l} of length {d}",
            plan.z_vectors.len()
        )));
    }
    let z = DMatrix::from_fn(d, l, |i, j| plan.z_vectors[j][i]);
    let bias = model.mean_coeffs() * &z - DMatrix::identity(l, l);
    if bias.amax() > 1e-9 {
        return Err(Error::BiasedPlan(format!(
            "c_j' z_k deviates from identity by {:.3e}",
            bias.amax()
        )));
    }
    let re_z = z.transpose() * model.covariance() * &z;
    let im_z = 0.5 * z.transpose() * omega(model.n_modes()) * &z;
    let trace_re = re_z.trace();
    let trabs_im = trabs_real(&im_z)?;
    Ok(MseBreakdown { total: trace_re + trabs_im, trace_re, trabs_im })
}

/// Pattern-matches a two-parameter plan against the symmetric-probe
/// circuit family √2(t, 0, t−1, 0) / √2(0, 1−t, 0, −t). Returns `None` for
/// plans outside the family.
pub fn circuit_params(plan: &MeasurementPlan) -> Option<Circuit> {
    if plan.z_vectors.len() != 2 || plan.z_vectors[0].len() != 4 {
        return None;
    }
    let s = 2.0_f64.sqrt();
    let t = plan.z_vectors[0][0] / s;
    let z1 = [s * t, 0.0, s * (t - 1.0), 0.0];
    let z2 = [0.0, s * (1.0 - t), 0.0, -s * t];
    let dev = plan.z_vectors[0]
        .iter()
        .zip(z1.iter())
        .chain(plan.z_vectors[1].iter().zip(z2.iter()))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if dev > CIRCUIT_MATCH_TOL {
        return None;
    }
    if t > 1.0 + CIRCUIT_MATCH_TOL {
        Some(Circuit::Infeasible { t })
    } else if (t - 1.0).abs() <= CIRCUIT_MATCH_TOL {
        Some(Circuit::DoubleHomodyne)
    } else if t > 0.0 {
        Some(Circuit::DoubleUnbalancedHeterodyne { t })
    } else {
        Some(Circuit::Infeasible { t })
    }
}

/// The plan of the double-homodyne circuit (the t = 1 member), used as the
/// suboptimality witness below threshold.
pub fn double_homodyne_plan() -> MeasurementPlan {
    let s = 2.0_f64.sqrt();
    MeasurementPlan {
        z_vectors: vec![vec![s, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, -s]],
        commutators: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        achieved_mse: f64::NAN,
        circuit: Some(Circuit::DoubleHomodyne),
    }
}
