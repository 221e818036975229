//! Gaussian probes with displacement-encoded means and their
//! orthonormal-frame matrix data.
//!
//! A probe is a covariance bilinear form `A` (2n×2n, quadrature ordering
//! (y₁, x₁, …, yₙ, xₙ), vacuum variance 1/2) together with an l×2n matrix
//! of mean coefficients: parameter j shifts the mean along the linear
//! functional `z ↦ c_jᵀ z`. All bound computations consume the
//! orthonormalized representation ([`EuclideanFrame`]): a basis `E` with
//! `Eᵀ A E = I`, the mean overlaps 𝕄, the symplectic form 𝔻 in that basis,
//! and the Hermitian matrix ℂ = (I + ½i𝔻)⁻¹.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the quantum-covariance check λmin(A + (i/2)Ω) ≥ -tol.
pub const QUANTUM_COV_TOL: f64 = 1e-10;

/// Eigenvalue floor applied to I + ½i𝔻 when forming ℂ. Pure probes sit on
/// the boundary where the inverse does not exist; the floor keeps ℂ finite
/// (‖ℂ‖ ≤ 1e7) so frame consumers stay well-defined. Bound computations
/// that need full accuracy at the boundary go through
/// [`crate::holevo_sdp::holevo_bound_model`], which extrapolates off the
/// boundary instead of relying on the capped ℂ.
pub const KAPPA_EIG_FLOOR: f64 = 1e-7;

/// Block-diagonal symplectic matrix Ω with 2×2 blocks [[0,1],[-1,0]] per
/// mode in (y, x) ordering. Ω = -Ωᵀ and Ω² = -I.
pub fn omega(n_modes: usize) -> DMatrix<f64> {
    let d = 2 * n_modes;
    DMatrix::from_fn(d, d, |i, j| {
        if i % 2 == 0 && j == i + 1 {
            1.0
        } else if i % 2 == 1 && j + 1 == i {
            -1.0
        } else {
            0.0
        }
    })
}

/// Skew-symmetric form Δ(z, z') = zᵀΩz' = Σ_j (x'_j y_j − x_j y'_j).
pub fn symplectic_form(z: &DVector<f64>, z_prime: &DVector<f64>) -> Result<f64> {
    if z.len() != z_prime.len() || z.len() % 2 != 0 {
        return Err(Error::Input(format!(
            "symplectic form needs equal even-length vectors, got {} and {}",
            z.len(),
            z_prime.len()
        )));
    }
    let mut acc = 0.0;
    for m in 0..z.len() / 2 {
        let (y, x) = (z[2 * m], z[2 * m + 1]);
        let (yp, xp) = (z_prime[2 * m], z_prime[2 * m + 1]);
        acc += xp * y - x * yp;
    }
    Ok(acc)
}

/// An n-mode Gaussian probe: covariance bilinear form and the coefficient
/// rows of the displacement-encoded mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeModel {
    n_modes: usize,
    n_params: usize,
    covariance: DMatrix<f64>,
    mean_coeffs: DMatrix<f64>,
}

/// Wire format of the probe JSON file.
#[derive(Serialize, Deserialize)]
struct ProbeFile {
    modes: usize,
    params: usize,
    ordering: String,
    covariance: Vec<Vec<f64>>,
    mean_coeffs: Vec<Vec<f64>>,
}

impl ProbeModel {
    /// Validates and constructs a probe. The covariance must be symmetric,
    /// satisfy the quantum condition A + (i/2)Ω ⪰ 0, and the mean
    /// coefficient rows must be linearly independent.
    pub fn new(covariance: DMatrix<f64>, mean_coeffs: DMatrix<f64>) -> Result<Self> {
        let d = covariance.nrows();
        if d == 0 || d % 2 != 0 || covariance.ncols() != d {
            return Err(Error::Input(format!(
                "covariance must be square with even dimension, got {}x{}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if mean_coeffs.ncols() != d || mean_coeffs.nrows() == 0 {
            return Err(Error::Input(format!(
                "mean_coeffs must be l x {} with l >= 1, got {}x{}",
                d,
                mean_coeffs.nrows(),
                mean_coeffs.ncols()
            )));
        }
        let scale = covariance.amax().max(1.0);
        let asym = (&covariance - covariance.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::Input(format!(
                "covariance is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        let covariance = 0.5 * (&covariance + covariance.transpose());

        let n_modes = d / 2;
        let min_eig = quantum_min_eigenvalue(&covariance);
        if min_eig < -QUANTUM_COV_TOL {
            return Err(Error::InvalidState(format!(
                "covariance violates A + (i/2)Omega >= 0 (min eigenvalue {min_eig:.3e})"
            )));
        }

        let l = mean_coeffs.nrows();
        let svd = mean_coeffs.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if l > d || smin <= 1e-10 * smax.max(1.0) {
            return Err(Error::Unidentifiable(format!(
                "mean_coeffs is rank-deficient (singular values {smin:.3e} .. {smax:.3e})"
            )));
        }

        Ok(Self { n_modes, n_params: l, covariance, mean_coeffs })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn mean_coeffs(&self) -> &DMatrix<f64> {
        &self.mean_coeffs
    }

    /// Vector representing the linear functional `z ↦ coeffᵀz` in the
    /// α inner product: the solution of A m = coeff.
    pub fn riesz_vector(&self, coeff: &DVector<f64>) -> Result<DVector<f64>> {
        if coeff.len() != 2 * self.n_modes {
            return Err(Error::Input(format!(
                "coefficient vector has length {}, expected {}",
                coeff.len(),
                2 * self.n_modes
            )));
        }
        self.covariance
            .clone()
            .lu()
            .solve(coeff)
            .ok_or_else(|| Error::Numerical("singular covariance in Riesz solve".into()))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ProbeFile = serde_json::from_str(text)
            .map_err(|e| Error::Input(format!("probe JSON parse failure: {e}")))?;
        if file.ordering != "yx-interleaved" {
            return Err(Error::Input(format!(
                "unsupported ordering {:?}, expected \"yx-interleaved\"",
                file.ordering
            )));
        }
        let d = 2 * file.modes;
        let covariance = matrix_from_rows(&file.covariance, d, d, "covariance")?;
        let mean_coeffs = matrix_from_rows(&file.mean_coeffs, file.params, d, "mean_coeffs")?;
        Self::new(covariance, mean_coeffs)
    }

    pub fn to_json_string(&self) -> String {
        let file = ProbeFile {
            modes: self.n_modes,
            params: self.n_params,
            ordering: "yx-interleaved".into(),
            covariance: rows_from_matrix(&self.covariance),
            mean_coeffs: rows_from_matrix(&self.mean_coeffs),
        };
        serde_json::to_string_pretty(&file).expect("probe serialization cannot fail")
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], nr: usize, nc: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != nr || rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Input(format!("{what} must be {nr}x{nc}")));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

fn rows_from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Smallest eigenvalue of A + (i/2)Ω, computed on the real embedding
/// [[A, -Ω/2], [Ω/2, A]].
pub(crate) fn quantum_min_eigenvalue(covariance: &DMatrix<f64>) -> f64 {
    let d = covariance.nrows();
    let om = omega(d / 2);
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(covariance);
    m.view_mut((d, d), (d, d)).copy_from(covariance);
    m.view_mut((0, d), (d, d)).copy_from(&(-0.5 * &om));
    m.view_mut((d, 0), (d, d)).copy_from(&(0.5 * &om));
    symmetric_eigenvalues(&m).min()
}

pub(crate) fn symmetric_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    let sym = 0.5 * (m + m.transpose());
    sym.symmetric_eigen().eigenvalues
}

/// Symmetric two-mode squeezed thermal probe after the decoupling beam
/// splitter: A = v·diag(e^{-2r}, e^{2r}, e^{2r}, e^{-2r}) with mean rows
/// (1,0,-1,0)/√2 and (0,1,0,-1)/√2.
pub fn symmetric_tmst_probe(v: f64, r: f64) -> Result<ProbeModel> {
    if !(v >= 0.5) {
        return Err(Error::InvalidState(format!(
            "thermal variance v = {v} below vacuum level 1/2"
        )));
    }
    if !(r >= 0.0) {
        return Err(Error::Input(format!("squeezing r = {r} must be nonnegative")));
    }
    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![
        v * (-2.0 * r).exp(),
        v * (2.0 * r).exp(),
        v * (2.0 * r).exp(),
        v * (-2.0 * r).exp(),
    ]));
    let s = 1.0 / 2.0_f64.sqrt();
    let coeffs =
        DMatrix::from_row_slice(2, 4, &[s, 0.0, -s, 0.0, 0.0, s, 0.0, -s]);
    ProbeModel::new(a, coeffs)
}

/// Duan inseparability sum Var(Q₁-Q₂) + Var(P₁+P₂) = 4v·e^{-2r} for the
/// pre-beam-splitter symmetric TMST.
pub fn duan_sum(v: f64, r: f64) -> f64 {
    4.0 * v * (-2.0 * r).exp()
}

/// The probe is entangled iff the Duan sum drops below 2, i.e.
/// r > r₀ = ½·log(2v).
pub fn is_entangled(v: f64, r: f64) -> bool {
    duan_sum(v, r) < 2.0
}

/// Orthonormalized probe representation. Columns of `basis` satisfy
/// α(e_j, e_k) = δ_jk; `m_mat` holds α(m_j, e_k); `d_mat` is the symplectic
/// form in the basis (antisymmetric); `c_mat` = (I + ½i·d_mat)⁻¹ is
/// Hermitian positive definite (eigenvalue-capped at the pure-state
/// boundary, see [`KAPPA_EIG_FLOOR`]).
#[derive(Debug, Clone)]
pub struct EuclideanFrame {
    pub basis: DMatrix<f64>,
    pub m_mat: DMatrix<f64>,
    pub d_mat: DMatrix<f64>,
    pub c_mat: DMatrix<Complex<f64>>,
}

impl EuclideanFrame {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.m_mat.nrows()
    }

    /// Smallest eigenvalue of I + ½i·d_mat, before any capping. Zero marks
    /// a pure probe, where ℂ is a capped stand-in for a divergent inverse.
    pub fn kappa_min_eigenvalue(&self) -> f64 {
        kappa_min_eigenvalue(&self.d_mat)
    }
}

pub(crate) fn kappa_min_eigenvalue(d_mat: &DMatrix<f64>) -> f64 {
    let d = d_mat.nrows();
    let mut m = DMatrix::identity(2 * d, 2 * d);
    m.view_mut((0, d), (d, d)).copy_from(&(-0.5 * d_mat));
    m.view_mut((d, 0), (d, d)).copy_from(&(0.5 * d_mat));
    symmetric_eigenvalues(&m).min()
}

/// Default frame from the Cholesky factorization A = LLᵀ: E = L⁻ᵀ.
pub fn orthonormal_frame(model: &ProbeModel) -> Result<EuclideanFrame> {
    let chol = model
        .covariance()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidState("covariance is not positive definite".into()))?;
    let d = model.covariance().nrows();
    let basis = chol
        .l()
        .transpose()
        .solve_upper_triangular(&DMatrix::identity(d, d))
        .ok_or_else(|| Error::Numerical("triangular solve failed building frame".into()))?;
    frame_from_basis(model, basis)
}

/// Frame with a caller-supplied basis (cross-check paths). The basis must
/// satisfy Eᵀ A E = I.
pub fn orthonormal_frame_with_basis(
    model: &ProbeModel,
    basis: DMatrix<f64>,
) -> Result<EuclideanFrame> {
    let d = model.covariance().nrows();
    if basis.nrows() != d || basis.ncols() != d {
        return Err(Error::Input(format!(
            "basis must be {d}x{d}, got {}x{}",
            basis.nrows(),
            basis.ncols()
        )));
    }
    let gram = basis.transpose() * model.covariance() * &basis;
    let dev = (&gram - DMatrix::identity(d, d)).amax();
    if dev > 1e-10 {
        return Err(Error::Input(format!(
            "supplied basis is not orthonormal in the state inner product (deviation {dev:.3e})"
        )));
    }
    frame_from_basis(model, basis)
}

fn frame_from_basis(model: &ProbeModel, basis: DMatrix<f64>) -> Result<EuclideanFrame> {
    let m_mat = model.mean_coeffs() * &basis;
    let d_mat_raw = basis.transpose() * omega(model.n_modes()) * &basis;
    // exact antisymmetry by construction
    let d_mat = 0.5 * (&d_mat_raw - d_mat_raw.transpose());
    let c_mat = capped_inverse_kappa(&d_mat);
    Ok(EuclideanFrame { basis, m_mat, d_mat, c_mat })
}

/// ℂ = (I + ½i𝔻)⁻¹ via the real embedding, with eigenvalues of I + ½i𝔻
/// floored at [`KAPPA_EIG_FLOOR`].
fn capped_inverse_kappa(d_mat: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    let d = d_mat.nrows();
    let mut k = DMatrix::identity(2 * d, 2 * d);
    k.view_mut((0, d), (d, d)).copy_from(&(-0.5 * d_mat));
    k.view_mut((d, 0), (d, d)).copy_from(&(0.5 * d_mat));
    let eig = k.symmetric_eigen();
    let inv_vals =
        DVector::from_iterator(2 * d, eig.eigenvalues.iter().map(|&l| 1.0 / l.max(KAPPA_EIG_FLOOR)));
    let inv = &eig.eigenvectors * DMatrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose();

    let tl = inv.view((0, 0), (d, d));
    let br = inv.view((d, d), (d, d));
    let bl = inv.view((d, 0), (d, d));
    let tr = inv.view((0, d), (d, d));
    let re_raw = 0.5 * (tl + br);
    let im_raw = 0.5 * (bl - tr);
    let re = 0.5 * (&re_raw + re_raw.transpose());
    let im = 0.5 * (&im_raw - im_raw.transpose());
    DMatrix::from_fn(d, d, |i, j| Complex::new(re[(i, j)], im[(i, j)]))
}
