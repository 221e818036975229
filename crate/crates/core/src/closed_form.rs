//! Analytic solution for the symmetric two-mode squeezed thermal probe:
//! bound, optimizer family, and primal/dual certificates for both
//! squeezing regimes.
//!
//! The threshold r₀ = ½·log(2v) separates two branches. Below it the
//! optimizer is a one-parameter family indexed by c₀ (every member yields
//! the same measurement); at and above it the optimizer is unique. The
//! certificates are exact: they satisfy the primal and dual constraints
//! with zero duality gap, which [`crate::holevo_sdp::verify_certificate`]
//! confirms numerically.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian_model::{orthonormal_frame, symmetric_tmst_probe};
use crate::holevo_sdp::{build_sdp, dual_slack_matrix, BlockMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BelowThreshold,
    AtOrAboveThreshold,
}

/// Squeezing threshold r₀ = ½·log(2v).
pub fn threshold_r0(v: f64) -> f64 {
    0.5 * (2.0 * v).ln()
}

pub fn regime(v: f64, r: f64) -> Regime {
    if r < threshold_r0(v) {
        Regime::BelowThreshold
    } else {
        Regime::AtOrAboveThreshold
    }
}

/// Closed-form bound: (4v²−1)/(2v·cosh 2r − 1) below threshold,
/// 4v·e^{−2r} at or above it. Requires v ≥ 1/2 and r ≥ 0.
pub fn holevo_bound_closed(v: f64, r: f64) -> f64 {
    match regime(v, r) {
        Regime::BelowThreshold => (4.0 * v * v - 1.0) / (2.0 * v * (2.0 * r).cosh() - 1.0),
        Regime::AtOrAboveThreshold => 4.0 * v * (-2.0 * r).exp(),
    }
}

/// Upper end of the admissible c₀ interval. Zero at and above threshold;
/// below it, v/(2v·cosh 2r − 1) − 2v/(4v²−1), which is positive there and
/// shrinks to zero at r = r₀.
pub fn c0_max(v: f64, r: f64) -> f64 {
    match regime(v, r) {
        Regime::AtOrAboveThreshold => 0.0,
        Regime::BelowThreshold => {
            v / (2.0 * v * (2.0 * r).cosh() - 1.0) - 2.0 * v / (4.0 * v * v - 1.0)
        }
    }
}

fn validate_inputs(v: f64, r: f64) -> Result<()> {
    if !(v >= 0.5) {
        return Err(Error::InvalidState(format!("v = {v} must be at least 1/2")));
    }
    if !(r >= 0.0) {
        return Err(Error::Input(format!("r = {r} must be nonnegative")));
    }
    Ok(())
}

fn validate_c0(v: f64, r: f64, c0: f64) -> Result<()> {
    let max = c0_max(v, r);
    if !(0.0..=max + 1e-15).contains(&c0) {
        return Err(Error::Input(format!(
            "c0 = {c0} outside admissible range [0, {max:.6e}] at v={v}, r={r}"
        )));
    }
    Ok(())
}

/// Optimizer 𝔽* in the frame basis. Above threshold: diag(1, 0, 0, 1).
/// Below: diagonal entries (c₁, c₂, c₂, c₁) with −c₀ couplings on the
/// (1,3) and (2,4) positions.
pub fn optimal_f_closed(v: f64, r: f64, c0: f64) -> Result<DMatrix<f64>> {
    validate_inputs(v, r)?;
    validate_c0(v, r, c0)?;
    match regime(v, r) {
        Regime::AtOrAboveThreshold => Ok(DMatrix::from_diagonal(&DVector::from_vec(vec![
            1.0, 0.0, 0.0, 1.0,
        ]))),
        Regime::BelowThreshold => {
            let (c1, c2) = family_coeffs(v, r, c0);
            let mut f = DMatrix::from_diagonal(&DVector::from_vec(vec![c1, c2, c2, c1]));
            f[(0, 2)] = -c0;
            f[(2, 0)] = -c0;
            f[(1, 3)] = -c0;
            f[(3, 1)] = -c0;
            Ok(f)
        }
    }
}

fn family_coeffs(v: f64, r: f64, c0: f64) -> (f64, f64) {
    let w = 4.0 * v * v - 1.0;
    let c1 = 2.0 * v * (2.0 * v - (-2.0 * r).exp()) / w - (-2.0 * r).exp() * c0;
    let c2 = 2.0 * v * (2.0 * v - (2.0 * r).exp()) / w - (2.0 * r).exp() * c0;
    (c1, c2)
}

fn cplx(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// Exact primal/dual certificate (y*, X*). The X* entries include a
/// genuinely complex block, so the pair exercises the full Hermitian
/// verification path. Requires v > 1/2: on the pure boundary the LMI data
/// itself degenerates and no finite certificate exists.
pub fn certificate_closed(v: f64, r: f64, c0: f64) -> Result<(DVector<f64>, BlockMatrix)> {
    validate_inputs(v, r)?;
    if v <= 0.5 {
        return Err(Error::Input(
            "closed-form certificates require v > 1/2 (pure-state boundary excluded)".into(),
        ));
    }
    validate_c0(v, r, c0)?;

    let e2r = (2.0 * r).exp();
    let em2r = (-2.0 * r).exp();
    match regime(v, r) {
        Regime::AtOrAboveThreshold => {
            let k = 2.0 * v * em2r;
            let mut y = DVector::zeros(13);
            y[0] = 1.0;
            y[3] = 1.0;
            y[10] = k;
            y[11] = k;

            let x1 = DMatrix::from_row_slice(
                4,
                4,
                &[
                    1.0, 0.0, -k, 0.0, //
                    0.0, 1.0, 0.0, -k, //
                    -k, 0.0, k * k, 0.0, //
                    0.0, -k, 0.0, k * k,
                ],
            );
            let s2 = em2r * (1.0 - 4.0 * v * v * em2r * em2r) / (2.0 * v);
            let x2 =
                DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, s2, s2, 0.0]));
            let h = 1.0 / (2.0 * v);
            let g = 2.0 * v * em2r;
            let gg = 4.0 * v * v * em2r;
            let x3 = DMatrix::from_row_slice(
                4,
                4,
                &[
                    cplx(2.0 * v, 0.0),
                    cplx(0.0, 1.0),
                    cplx(-g, 0.0),
                    cplx(0.0, -gg),
                    //
                    cplx(0.0, -1.0),
                    cplx(h, 0.0),
                    cplx(0.0, em2r),
                    cplx(-g, 0.0),
                    //
                    cplx(-g, 0.0),
                    cplx(0.0, -em2r),
                    cplx(h, 0.0),
                    cplx(0.0, 1.0),
                    //
                    cplx(0.0, gg),
                    cplx(-g, 0.0),
                    cplx(0.0, -1.0),
                    cplx(2.0 * v, 0.0),
                ],
            )
            .scale(em2r);
            Ok((
                y,
                BlockMatrix {
                    blocks: vec![x1.map(|x| cplx(x, 0.0)), x2.map(|x| cplx(x, 0.0)), x3],
                },
            ))
        }
        Regime::BelowThreshold => {
            let w = 4.0 * v * v - 1.0;
            let q = w / (4.0 * v * (2.0 * r).cosh() - 2.0);
            let (c1, c2) = family_coeffs(v, r, c0);
            let mut y = DVector::zeros(13);
            y[0] = c1;
            y[1] = c2;
            y[2] = c2;
            y[3] = c1;
            y[5] = -c0; // (1,3) coupling
            y[8] = -c0; // (2,4) coupling
            y[10] = q;
            y[11] = q;

            let x1 = DMatrix::from_row_slice(
                4,
                4,
                &[
                    1.0, 0.0, -q, 0.0, //
                    0.0, 1.0, 0.0, -q, //
                    -q, 0.0, q * q, 0.0, //
                    0.0, -q, 0.0, q * q,
                ],
            );
            let x2 = DMatrix::zeros(4, 4);
            let s3 = w * w / (2.0 * v * (4.0 * v * (2.0 * r).cosh() - 2.0).powi(2));
            let x3 = DMatrix::from_row_slice(
                4,
                4,
                &[
                    cplx(e2r, 0.0),
                    cplx(0.0, 1.0),
                    cplx(-1.0, 0.0),
                    cplx(0.0, -e2r),
                    //
                    cplx(0.0, -1.0),
                    cplx(em2r, 0.0),
                    cplx(0.0, em2r),
                    cplx(-1.0, 0.0),
                    //
                    cplx(-1.0, 0.0),
                    cplx(0.0, -em2r),
                    cplx(em2r, 0.0),
                    cplx(0.0, 1.0),
                    //
                    cplx(0.0, e2r),
                    cplx(-1.0, 0.0),
                    cplx(0.0, -1.0),
                    cplx(e2r, 0.0),
                ],
            )
            .scale(s3);
            Ok((
                y,
                BlockMatrix {
                    blocks: vec![x1.map(|x| cplx(x, 0.0)), x2.map(|x| cplx(x, 0.0)), x3],
                },
            ))
        }
    }
}

/// Numerically computed and symbolically transcribed spectra of the dual
/// slack Σy*B − C and of X*, each sorted ascending with zeros included
/// (twelve eigenvalues apiece).
#[derive(Debug, Clone)]
pub struct CertificateSpectra {
    pub slack_numeric: Vec<f64>,
    pub slack_symbolic: Vec<f64>,
    pub x_numeric: Vec<f64>,
    pub x_symbolic: Vec<f64>,
}

pub fn certificate_eigenvalues(v: f64, r: f64, c0: f64) -> Result<CertificateSpectra> {
    let (y, x) = certificate_closed(v, r, c0)?;
    let probe = symmetric_tmst_probe(v, r)?;
    let frame = orthonormal_frame(&probe)?;
    let problem = build_sdp(&frame);

    let slack_numeric = dual_slack_matrix(&problem, &y).eigenvalues();
    let x_numeric = x.eigenvalues();

    let em2r = (-2.0 * r).exp();
    let ch = (2.0 * r).cosh();
    let w = 4.0 * v * v - 1.0;

    let (mut slack_symbolic, mut x_symbolic) = match regime(v, r) {
        Regime::AtOrAboveThreshold => {
            let slack = vec![
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                1.0,
                1.0,
                (1.0 + 4.0 * v * v * em2r * em2r) / (2.0 * v * em2r),
                (1.0 + 4.0 * v * v * em2r * em2r) / (2.0 * v * em2r),
                (4.0 * v * v + 1.0) / w,
                (4.0 * v * v + 1.0) / w,
            ];
            let xs = vec![
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                1.0 + 4.0 * v * v * em2r * em2r,
                1.0 + 4.0 * v * v * em2r * em2r,
                (1.0 - 4.0 * v * v * em2r * em2r) * em2r / (2.0 * v),
                (1.0 - 4.0 * v * v * em2r * em2r) * em2r / (2.0 * v),
                (1.0 + 4.0 * v * v) * (1.0 - 2.0 * v * em2r) * em2r / (2.0 * v),
                (1.0 + 4.0 * v * v) * (1.0 + 2.0 * v * em2r) * em2r / (2.0 * v),
            ];
            (slack, xs)
        }
        Regime::BelowThreshold => {
            let q = w / (4.0 * v * ch - 2.0);
            let u = 2.0 * v + w * c0;
            let root1 = (u * u - 8.0 * v * w * c0 / (ch * ch)).max(0.0).sqrt();
            let root2 = (u * u * ch * ch - 4.0 * v * v - 4.0 * v * w * c0).max(0.0).sqrt();
            let slack = vec![
                0.0,
                0.0,
                0.0,
                q + 1.0 / q,
                q + 1.0 / q,
                2.0 * (c0 + 2.0 * v / w) * ch,
                (ch / w) * (u + root1),
                (ch / w) * (u - root1),
                (4.0 * v * v - u * ch + root2) / w,
                (4.0 * v * v - u * ch + root2) / w,
                (4.0 * v * v - u * ch - root2) / w,
                (4.0 * v * v - u * ch - root2) / w,
            ];
            let denom = 2.0 * v * ch - 1.0;
            let xs = vec![
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                w * w * ch / (2.0 * v * denom * denom),
                1.0 + w * w / (4.0 * denom * denom),
                1.0 + w * w / (4.0 * denom * denom),
            ];
            (slack, xs)
        }
    };
    slack_symbolic.sort_by(|a, b| a.partial_cmp(b).unwrap());
    x_symbolic.sort_by(|a, b| a.partial_cmp(b).unwrap());

    Ok(CertificateSpectra { slack_numeric, slack_symbolic, x_numeric, x_symbolic })
}

/// Everything the closed form knows about one (v, r, c₀) instance.
#[derive(Debug, Clone)]
pub struct ClosedFormSolution {
    pub v: f64,
    pub r: f64,
    pub r0: f64,
    pub regime: Regime,
    pub sigma_star: f64,
    pub f_opt: DMatrix<f64>,
    /// Beam-splitter transmission of the attaining circuit; only defined
    /// below threshold (it is 1 at the threshold itself).
    pub t: Option<f64>,
    /// Analytic certificate; absent exactly on the pure-state boundary.
    pub certificate: Option<(DVector<f64>, BlockMatrix)>,
}

impl ClosedFormSolution {
    pub fn new(v: f64, r: f64, c0: f64) -> Result<Self> {
        validate_inputs(v, r)?;
        let reg = regime(v, r);
        let f_opt = optimal_f_closed(v, r, c0)?;
        let t = match reg {
            Regime::BelowThreshold => Some(crate::optimal_measurement::optimal_t(v, r)),
            Regime::AtOrAboveThreshold => None,
        };
        let certificate = if v > 0.5 { Some(certificate_closed(v, r, c0)?) } else { None };
        Ok(Self {
            v,
            r,
            r0: threshold_r0(v),
            regime: reg,
            sigma_star: holevo_bound_closed(v, r),
            f_opt,
            t,
            certificate,
        })
    }
}
