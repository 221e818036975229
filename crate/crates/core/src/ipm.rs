//! Dense primal-dual interior-point solver for small block-diagonal SDPs.
//!
//! Solves the pair
//!
//! ```text
//!   (P)  max ⟨C, X⟩   s.t. ⟨B_j, X⟩ = b_j,  X ⪰ 0
//!   (D)  min bᵀy      s.t. S = Σ_j y_j B_j − C ⪰ 0
//! ```
//!
//! over real symmetric block matrices, using Nesterov-Todd scaling with a
//! Mehrotra-style adaptive centering parameter. Both starting points are
//! supplied strictly feasible by the caller, so the iteration reduces the
//! duality gap along the central path; the dual slack is recomputed from y
//! every step, keeping dual feasibility exact by construction. The solver
//! is deterministic: no randomized pivoting, no data-dependent reordering.

use nalgebra::{DMatrix, DVector};

use crate::accum::dot2;

pub(crate) struct RealSdp {
    pub block_sizes: Vec<usize>,
    pub c: Vec<DMatrix<f64>>,
    /// constraints[j] holds the blocks of B_j.
    pub constraints: Vec<Vec<DMatrix<f64>>>,
    pub b: DVector<f64>,
}

pub(crate) struct IpmOptions {
    pub gap_tol: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct IpmOutcome {
    pub y: DVector<f64>,
    pub x: Vec<DMatrix<f64>>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl RealSdp {
    fn num_constraints(&self) -> usize {
        self.b.len()
    }

    fn total_dim(&self) -> f64 {
        self.block_sizes.iter().sum::<usize>() as f64
    }

    /// A(X): constraint traces, compensated.
    fn apply(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.num_constraints(),
            self.constraints.iter().map(|bj| inner(bj, x)),
        )
    }

    /// A*(y) = Σ y_j B_j.
    fn apply_adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> =
            self.block_sizes.iter().map(|&s| DMatrix::zeros(s, s)).collect();
        for (j, bj) in self.constraints.iter().enumerate() {
            let w = y[j];
            if w != 0.0 {
                for (o, blk) in out.iter_mut().zip(bj.iter()) {
                    *o += blk.scale(w);
                }
            }
        }
        out
    }

    fn dual_slack(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut s = self.apply_adjoint(y);
        for (sk, ck) in s.iter_mut().zip(self.c.iter()) {
            *sk -= ck;
        }
        s
    }
}

/// Compensated ⟨A, B⟩ = Σ Tr(A_k B_k) over symmetric blocks.
pub(crate) fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    dot2(
        a.iter()
            .zip(b.iter())
            .flat_map(|(ak, bk)| ak.iter().copied().zip(bk.iter().copied())),
    )
}

fn plain_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// Largest step α so that P + α·D stays PSD, given the Cholesky factor of P.
/// Returns +inf when D pushes inward everywhere.
fn max_step(chol_l: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let t1 = chol_l
        .solve_lower_triangular(d)
        .expect("triangular solve with nonsingular factor");
    let t2 = chol_l
        .solve_lower_triangular(&t1.transpose())
        .expect("triangular solve with nonsingular factor");
    let mut g = t2;
    symmetrize(&mut g);
    let lmin = g.symmetric_eigen().eigenvalues.min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

struct Scaling {
    w: Vec<DMatrix<f64>>,
    s_inv: Vec<DMatrix<f64>>,
    chol_x: Vec<DMatrix<f64>>,
    chol_s: Vec<DMatrix<f64>>,
}

/// Nesterov-Todd scaling point W per block: W S W = X.
fn nt_scaling(x: &[DMatrix<f64>], s: &[DMatrix<f64>]) -> Option<Scaling> {
    let mut w = Vec::with_capacity(x.len());
    let mut s_inv = Vec::with_capacity(x.len());
    let mut chol_x = Vec::with_capacity(x.len());
    let mut chol_s = Vec::with_capacity(x.len());
    for (xk, sk) in x.iter().zip(s.iter()) {
        let cx = xk.clone().cholesky()?;
        let cs = sk.clone().cholesky()?;
        let ls = cs.l();
        // T = Lsᵀ X Ls, eigendecompose, then W = (Ls⁻ᵀ U) Λ^{1/2} (Ls⁻ᵀ U)ᵀ
        let mut t = ls.transpose() * xk * &ls;
        symmetrize(&mut t);
        let eig = t.symmetric_eigen();
        if eig.eigenvalues.min() <= 0.0 {
            return None;
        }
        let v = ls
            .transpose()
            .solve_upper_triangular(&eig.eigenvectors)?;
        let sqrt_vals = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let mut wk = &v * sqrt_vals * v.transpose();
        symmetrize(&mut wk);
        w.push(wk);
        s_inv.push(cs.inverse());
        chol_x.push(cx.l());
        chol_s.push(cs.l());
    }
    Some(Scaling { w, s_inv, chol_x, chol_s })
}

fn sandwich(w: &[DMatrix<f64>], m: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    w.iter()
        .zip(m.iter())
        .map(|(wk, mk)| {
            let mut out = wk * mk * wk;
            symmetrize(&mut out);
            out
        })
        .collect()
}

/// One Newton solve for a given centrality target R_c (and current
/// residuals), reusing the factored Schur complement.
struct NewtonContext<'a> {
    problem: &'a RealSdp,
    scaling: &'a Scaling,
    /// Truncated spectral pseudo-inverse of the equilibrated Schur
    /// complement; components below the noise floor are dropped rather
    /// than amplified.
    m_pinv: DMatrix<f64>,
    m_mat: DMatrix<f64>,
    jacobi: DVector<f64>,
}

impl<'a> NewtonContext<'a> {
    fn build(problem: &'a RealSdp, scaling: &'a Scaling) -> Option<Self> {
        let k = problem.num_constraints();
        let wbw: Vec<Vec<DMatrix<f64>>> = problem
            .constraints
            .iter()
            .map(|bj| sandwich(&scaling.w, bj))
            .collect();
        let mut m = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let mut acc = 0.0;
                for (bi, wj) in problem.constraints[i].iter().zip(wbw[j].iter()) {
                    acc += plain_inner(bi, wj);
                }
                m[(i, j)] = acc;
                m[(j, i)] = acc;
            }
        }
        // Jacobi equilibration narrows the eigenvalue spread of the Schur
        // complement, which grows like 1/μ toward convergence
        let jacobi = DVector::from_iterator(
            k,
            (0..k).map(|i| 1.0 / m[(i, i)].abs().max(1e-300).sqrt()),
        );
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] *= jacobi[i] * jacobi[j];
            }
        }
        let eig = m.clone().symmetric_eigen();
        let lmax = eig.eigenvalues.amax().max(1e-300);
        let inv_vals = DVector::from_iterator(
            k,
            eig.eigenvalues
                .iter()
                .map(|&l| if l > lmax * 1e-14 { 1.0 / l } else { 0.0 }),
        );
        let m_pinv =
            &eig.eigenvectors * DMatrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose();
        Some(Self { problem, scaling, m_pinv, m_mat: m, jacobi })
    }

    fn solve_schur(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let scaled_rhs = rhs.component_mul(&self.jacobi);
        let mut z = &self.m_pinv * &scaled_rhs;
        for _ in 0..2 {
            let resid = &scaled_rhs - &self.m_mat * &z;
            z += &self.m_pinv * &resid;
        }
        z.component_mul(&self.jacobi)
    }

    /// Solve for (dy, dS, dX) given centrality target R_c and residuals
    /// r_p = b − A(X), R_d = C − A*(y) + S.
    fn solve(
        &self,
        r_c: &[DMatrix<f64>],
        r_p: &DVector<f64>,
        r_d: &[DMatrix<f64>],
    ) -> (DVector<f64>, Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
        let wrw = sandwich(&self.scaling.w, r_d);
        let mut rhs = DVector::zeros(self.problem.num_constraints());
        for (j, bj) in self.problem.constraints.iter().enumerate() {
            let mut acc = 0.0;
            for ((bk, rck), wk) in bj.iter().zip(r_c.iter()).zip(wrw.iter()) {
                acc += plain_inner(bk, &(rck + wk));
            }
            rhs[j] = acc - r_p[j];
        }
        let dy = self.solve_schur(&rhs);

        let mut ds = self.problem.apply_adjoint(&dy);
        for (dsk, rdk) in ds.iter_mut().zip(r_d.iter()) {
            *dsk -= rdk;
        }
        let wdsw = sandwich(&self.scaling.w, &ds);
        let dx: Vec<DMatrix<f64>> = r_c
            .iter()
            .zip(wdsw.iter())
            .map(|(rck, wk)| {
                let mut m = rck - wk;
                symmetrize(&mut m);
                m
            })
            .collect();
        (dy, ds, dx)
    }
}

fn fraction_to_boundary(mu: f64) -> f64 {
    if mu > 1e-5 {
        0.98
    } else if mu > 1e-9 {
        0.995
    } else {
        0.9995
    }
}

/// Minimum-norm correction enforcing A(M) = target exactly, built on the
/// constant Gram matrix of the constraints. Applied to every computed
/// primal direction, it stops Schur-solve noise from leaking into the
/// primal feasibility as the barrier parameter shrinks.
struct FeasibilityProjector {
    gram_chol: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
}

impl FeasibilityProjector {
    fn new(problem: &RealSdp) -> Self {
        let k = problem.num_constraints();
        let mut gram = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let g = inner(&problem.constraints[i], &problem.constraints[j]);
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        Self { gram_chol: gram.cholesky() }
    }

    fn correct(&self, problem: &RealSdp, m: &mut [DMatrix<f64>], target: &DVector<f64>) {
        let Some(chol) = &self.gram_chol else { return };
        let residual = target - problem.apply(m);
        let weights = chol.solve(&residual);
        let correction = problem.apply_adjoint(&weights);
        for (mk, ck) in m.iter_mut().zip(correction.iter()) {
            *mk += ck;
            symmetrize(mk);
        }
    }
}

pub(crate) fn solve_block_sdp(
    problem: &RealSdp,
    x0: Vec<DMatrix<f64>>,
    y0: DVector<f64>,
    opts: &IpmOptions,
) -> IpmOutcome {
    let nu = problem.total_dim();
    let feas_tol = 1e-9 * (1.0 + problem.b.amax());
    let projector = FeasibilityProjector::new(problem);

    let mut x = x0;
    let mut y = y0;
    let mut s = problem.dual_slack(&y);
    projector.correct(problem, &mut x, &problem.b);

    let mut best: Option<IpmOutcome> = None;
    let mut stalls = 0usize;
    let mut recoveries = 0usize;

    for iter in 0..=opts.max_iterations {
        let primal_value = inner(&problem.c, &x);
        let dual_value = dot2(problem.b.iter().copied().zip(y.iter().copied()));
        let gap = dual_value - primal_value;
        let r_p = &problem.b - problem.apply(&x);
        let pinf = r_p.amax();
        // dual slack is recomputed from y, so the dual residual is zero by
        // construction; report the complementarity scale instead
        let dinf = 0.0;

        let outcome = IpmOutcome {
            y: y.clone(),
            x: x.clone(),
            primal_value,
            dual_value,
            gap,
            primal_residual: pinf,
            dual_residual: dinf,
            iterations: iter,
            converged: pinf <= feas_tol && gap.abs() <= opts.gap_tol,
        };
        let score = pinf.max(gap.abs());
        if best.as_ref().map_or(true, |b| score < b.primal_residual.max(b.gap.abs())) {
            best = Some(outcome.clone());
        }
        if outcome.converged || iter == opts.max_iterations || stalls >= 12 {
            return if outcome.converged { outcome } else { best.unwrap() };
        }

        let mu = inner(&x, &s) / nu;
        let scaling = match nt_scaling(&x, &s) {
            Some(sc) => sc,
            None => {
                // an iterate lost definiteness to rounding; push it back
                // into the cone and continue (the primal residual this
                // introduces is handled by the Newton system)
                recoveries += 1;
                if recoveries > 4 {
                    return best.unwrap();
                }
                for xk in x.iter_mut() {
                    let bump = 1e-12 * (1.0 + xk.amax());
                    for i in 0..xk.nrows() {
                        xk[(i, i)] += bump;
                    }
                }
                continue;
            }
        };
        let newton = match NewtonContext::build(problem, &scaling) {
            Some(n) => n,
            None => return best.unwrap(),
        };

        // R_d = C − A*(y) + S ≡ 0 with the recomputed slack
        let r_d: Vec<DMatrix<f64>> =
            problem.block_sizes.iter().map(|&sz| DMatrix::zeros(sz, sz)).collect();

        // predictor: aim at the boundary (σ = 0)
        let r_c_aff: Vec<DMatrix<f64>> = x.iter().map(|xk| -xk).collect();
        let (_, ds_aff, dx_aff) = newton.solve(&r_c_aff, &r_p, &r_d);
        let ap_aff = step_length(&scaling.chol_x, &dx_aff);
        let ad_aff = step_length(&scaling.chol_s, &ds_aff);
        let mu_aff = {
            let xa: Vec<DMatrix<f64>> = x
                .iter()
                .zip(dx_aff.iter())
                .map(|(xk, dk)| xk + dk.scale(ap_aff))
                .collect();
            let sa: Vec<DMatrix<f64>> = s
                .iter()
                .zip(ds_aff.iter())
                .map(|(sk, dk)| sk + dk.scale(ad_aff))
                .collect();
            (inner(&xa, &sa) / nu).max(0.0)
        };
        // keep a centering floor in the endgame, where the affine
        // direction is too noisy to aim straight at the boundary
        let sigma_floor = if gap.abs() < 100.0 * opts.gap_tol { 0.05 } else { 1e-10 };
        let sigma = ((mu_aff / mu).powi(3)).clamp(sigma_floor, 1.0);

        // corrector: recenter toward σμ; the primal direction is then
        // projected so A(dX) = r_p holds to machine precision
        let r_c: Vec<DMatrix<f64>> = x
            .iter()
            .zip(scaling.s_inv.iter())
            .map(|(xk, sik)| sik.scale(sigma * mu) - xk)
            .collect();
        let (dy, ds, mut dx) = newton.solve(&r_c, &r_p, &r_d);
        projector.correct(problem, &mut dx, &r_p);

        let tau = fraction_to_boundary(mu);
        let ap = (tau * step_length(&scaling.chol_x, &dx)).min(1.0);
        let ad = (tau * step_length(&scaling.chol_s, &ds)).min(1.0);
        if ap < 1e-8 && ad < 1e-8 {
            stalls += 1;
        } else {
            stalls = 0;
        }
        log::trace!(
            "ipm iter {iter}: mu={mu:.3e} sigma={sigma:.3e} ap={ap:.3e} ad={ad:.3e} \
             gap={gap:.3e} pinf={pinf:.3e}"
        );

        let apply = |ap: f64, ad: f64| {
            let xs: Vec<DMatrix<f64>> = x
                .iter()
                .zip(dx.iter())
                .map(|(xk, dk)| {
                    let mut m = xk + dk.scale(ap);
                    symmetrize(&mut m);
                    m
                })
                .collect();
            let yn = &y + dy.scale(ad);
            let mut sn = problem.dual_slack(&yn);
            for sk in sn.iter_mut() {
                symmetrize(sk);
            }
            (xs, yn, sn)
        };
        let (mut xs, mut yn, mut sn) = apply(ap, ad);
        // asymmetric steps can push the complementarity back up near a
        // degenerate face; fall back to the common step when they do
        if inner(&xs, &sn) / nu > 1.2 * mu && (ap - ad).abs() > 1e-12 {
            let a = ap.min(ad);
            (xs, yn, sn) = apply(a, a);
        }
        x = xs;
        y = yn;
        s = sn;
    }
    unreachable!("loop returns on the final iteration");
}

fn step_length(chol: &[DMatrix<f64>], d: &[DMatrix<f64>]) -> f64 {
    chol.iter()
        .zip(d.iter())
        .map(|(l, dk)| max_step(l, dk))
        .fold(f64::INFINITY, f64::min)
}
