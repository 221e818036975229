//! SLD and RLD Cramér-Rao bounds for Gaussian mean estimation.
//!
//! For displacement (mean-only) estimation the Fisher matrices reduce to
//! overlaps of the frame data: G⁽ˢ⁾ = 𝕄𝕄ᵀ and G⁽ᴿ⁾ = 𝕄ℂ𝕄ᵀ. Neither bound
//! dominates the other in general; both are dominated by the Holevo bound.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::gaussian_model::{symmetric_eigenvalues, EuclideanFrame};

/// Condition-number threshold above which Fisher-matrix inversions log a
/// warning.
const CONDITION_WARN: f64 = 1e12;

/// SLD and RLD Fisher matrices with their scalar bound values.
#[derive(Debug, Clone)]
pub struct FisherResult {
    pub g_sld: DMatrix<f64>,
    pub g_rld: DMatrix<Complex<f64>>,
    pub c_sld: f64,
    pub c_rld: f64,
}

/// Sum of the absolute values of the eigenvalues. Accepts Hermitian and
/// anti-Hermitian matrices (which covers real symmetric and real
/// antisymmetric inputs).
pub fn trabs(m: &DMatrix<Complex<f64>>) -> Result<f64> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Input("trabs needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let scale = m.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let herm_dev = herm_deviation(m, 1.0);
    let antiherm_dev = herm_deviation(m, -1.0);
    let tol = 1e-12 * scale;
    let hermitian = if herm_dev <= tol {
        m.clone()
    } else if antiherm_dev <= tol {
        // eigenvalues of iM are the eigenvalues of M rotated onto the real
        // axis with unchanged magnitudes
        m.map(|c| Complex::new(0.0, 1.0) * c)
    } else {
        return Err(Error::Numerical(
            "trabs input is neither Hermitian nor anti-Hermitian".into(),
        ));
    };
    Ok(hermitian_eigenvalues(&hermitian).iter().map(|l| l.abs()).sum())
}

/// trabs for real matrices (symmetric or antisymmetric).
pub fn trabs_real(m: &DMatrix<f64>) -> Result<f64> {
    trabs(&m.map(|x| Complex::new(x, 0.0)))
}

fn herm_deviation(m: &DMatrix<Complex<f64>>, sign: f64) -> f64 {
    let n = m.nrows();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (m[(i, j)] - m[(j, i)].conj().scale(sign)).norm())
        .fold(0.0f64, f64::max)
}

/// Real eigenvalues of a Hermitian matrix via the doubled real embedding
/// [[Re, -Im], [Im, Re]]; every eigenvalue of the embedding appears twice,
/// so the halved multiset is exact.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex<f64>>) -> Vec<f64> {
    let n = m.nrows();
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let c = m[(i, j)];
            big[(i, j)] = c.re;
            big[(n + i, n + j)] = c.re;
            big[(i, n + j)] = -c.im;
            big[(n + i, j)] = c.im;
        }
    }
    let mut vals: Vec<f64> = symmetric_eigenvalues(&big).iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.into_iter().step_by(2).collect()
}

/// SLD Fisher matrix G⁽ˢ⁾ = 𝕄𝕄ᵀ and bound C⁽ˢ⁾ = Tr[(G⁽ˢ⁾)⁻¹].
pub fn sld_bound(frame: &EuclideanFrame) -> Result<(DMatrix<f64>, f64)> {
    let g = &frame.m_mat * frame.m_mat.transpose();
    let c = trace_inverse_real(&g)?;
    Ok((g, c))
}

/// RLD Fisher matrix G⁽ᴿ⁾ = 𝕄ℂ𝕄ᵀ and bound
/// C⁽ᴿ⁾ = Tr[Re(G⁽ᴿ⁾)⁻¹] + TrAbs[Im(G⁽ᴿ⁾)⁻¹].
pub fn rld_bound(frame: &EuclideanFrame) -> Result<(DMatrix<Complex<f64>>, f64)> {
    let l = frame.n_params();
    let m_c = frame.m_mat.map(|x| Complex::new(x, 0.0));
    let g = &m_c * &frame.c_mat * m_c.transpose();
    warn_if_ill_conditioned(&hermitian_eigenvalues(&g), "RLD");
    let g_inv = g
        .clone()
        .lu()
        .solve(&DMatrix::<Complex<f64>>::identity(l, l))
        .ok_or_else(|| Error::Numerical("singular RLD Fisher matrix".into()))?;
    let re = g_inv.map(|c| c.re);
    let im = g_inv.map(|c| c.im);
    let c_rld = re.trace() + trabs_real(&im)?;
    Ok((g, c_rld))
}

/// Both bounds bundled.
pub fn fisher_bounds(frame: &EuclideanFrame) -> Result<FisherResult> {
    let (g_sld, c_sld) = sld_bound(frame)?;
    let (g_rld, c_rld) = rld_bound(frame)?;
    Ok(FisherResult { g_sld, g_rld, c_sld, c_rld })
}

fn trace_inverse_real(g: &DMatrix<f64>) -> Result<f64> {
    let eigs = symmetric_eigenvalues(g);
    let (lo, hi) = (eigs.min(), eigs.max());
    if lo <= 0.0 {
        return Err(Error::Unidentifiable(format!(
            "Fisher matrix not positive definite (min eigenvalue {lo:.3e})"
        )));
    }
    warn_if_ill_conditioned(&eigs.iter().copied().collect::<Vec<_>>(), "SLD");
    let _ = hi;
    Ok(eigs.iter().map(|l| 1.0 / l).sum())
}

fn warn_if_ill_conditioned(eigs: &[f64], which: &str) {
    let hi = eigs.iter().cloned().fold(f64::MIN, f64::max).abs();
    let lo = eigs.iter().cloned().map(f64::abs).fold(f64::MAX, f64::min);
    if lo > 0.0 && hi / lo > CONDITION_WARN {
        log::warn!("{which} Fisher matrix condition number {:.3e} exceeds {CONDITION_WARN:.0e}", hi / lo);
    }
}
