//! Gaussian-level Monte Carlo simulation of the bound-attaining circuits.
//!
//! Every element of both schemes is Gaussian, so homodyne outcomes are
//! drawn from the exact joint normal distribution of the measured
//! quadratures (propagated mean and covariance) rather than from
//! per-photon physics. Estimator weights come from a generalized
//! least-squares solve against the propagated mean map, which makes the
//! estimators exactly unbiased and minimum-variance among linear
//! combinations of the readouts.
//!
//! Shots run in fixed-size batches; batch k draws from an independent
//! ChaCha12 stream derived from (seed, k), and batch results merge in
//! index order with compensated summation, so results are bit-identical
//! across runs and thread counts.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::accum::KahanSum;
use crate::error::{Error, Result};

const BATCH_SIZE: u64 = 1 << 16;

/// Which circuit to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    DoubleHomodyne,
    DoubleUnbalancedHeterodyne,
}

/// Full description of one simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct CircuitSpec {
    pub scheme: Scheme,
    pub v: f64,
    pub r: f64,
    /// Transmission of the second splitters (heterodyne scheme only;
    /// ignored for double homodyne).
    pub t: f64,
    pub theta: (f64, f64),
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimulationResult {
    pub empirical_mean: (f64, f64),
    pub empirical_mse_sum: f64,
    /// Standard error of the MSE-sum estimate.
    pub standard_error: f64,
    pub shots_used: u64,
}

/// Orthogonal symplectic beam splitter with amplitude transmission √t
/// acting on modes `mode_a`, `mode_b` of an `n_modes` register:
/// (q_a, p_a) → √t (q_a, p_a) + √(1−t) (q_b, p_b) and
/// (q_b, p_b) → −√(1−t) (q_a, p_a) + √t (q_b, p_b).
pub fn beam_splitter_symplectic(
    t: f64,
    mode_a: usize,
    mode_b: usize,
    n_modes: usize,
) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Input(format!("transmission t = {t} outside [0, 1]")));
    }
    if mode_a == mode_b || mode_a >= n_modes || mode_b >= n_modes {
        return Err(Error::Input(format!(
            "beam splitter needs two distinct modes below {n_modes}, got {mode_a}, {mode_b}"
        )));
    }
    let (c, s) = (t.sqrt(), (1.0 - t).sqrt());
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for off in 0..2 {
        let (ia, ib) = (2 * mode_a + off, 2 * mode_b + off);
        m[(ia, ia)] = c;
        m[(ia, ib)] = s;
        m[(ib, ia)] = -s;
        m[(ib, ib)] = c;
    }
    Ok(m)
}

/// Propagated measurement model: outcome = G·θ + noise with covariance Σ_o,
/// estimator θ̂ = W·outcome.
struct ReadoutModel {
    mean_map: DMatrix<f64>,
    noise_chol: DMatrix<f64>,
    weights: DMatrix<f64>,
}

fn build_readout(spec: &CircuitSpec) -> Result<ReadoutModel> {
    if !(spec.v >= 0.5) {
        return Err(Error::InvalidState(format!("v = {} below vacuum level", spec.v)));
    }
    if !(spec.r >= 0.0) {
        return Err(Error::Input(format!("r = {} must be nonnegative", spec.r)));
    }
    if spec.shots == 0 {
        return Err(Error::Input("shots must be at least 1".into()));
    }

    let (v, r) = (spec.v, spec.r);
    let ch = v * (2.0 * r).cosh();
    let sh = v * (2.0 * r).sinh();
    // entangled two-mode squeezed thermal state, displacement on mode 1
    let mut cov_probe = DMatrix::from_diagonal(&DVector::from_element(4, ch));
    cov_probe[(0, 2)] = -sh;
    cov_probe[(2, 0)] = -sh;
    cov_probe[(1, 3)] = sh;
    cov_probe[(3, 1)] = sh;

    let (n_modes, readouts): (usize, Vec<usize>) = match spec.scheme {
        // Q on one 50:50 output, P on the other
        Scheme::DoubleHomodyne => (2, vec![0, 3]),
        // transmitted Q / reflected P for signal 1 (ancilla mode 2),
        // transmitted P / reflected Q for signal 2 (ancilla mode 3)
        Scheme::DoubleUnbalancedHeterodyne => (4, vec![0, 5, 3, 6]),
    };

    let dim = 2 * n_modes;
    let mut cov = DMatrix::identity(dim, dim).scale(0.5); // vacuum ancillas
    cov.view_mut((0, 0), (4, 4)).copy_from(&cov_probe);
    let mut mean_of_theta = DMatrix::zeros(dim, 2);
    mean_of_theta[(0, 0)] = 1.0;
    mean_of_theta[(1, 1)] = 1.0;

    let mut transform = beam_splitter_symplectic(0.5, 0, 1, n_modes)?;
    if spec.scheme == Scheme::DoubleUnbalancedHeterodyne {
        if !(spec.t > 0.0 && spec.t <= 1.0) {
            return Err(Error::Input(format!(
                "heterodyne transmission t = {} outside (0, 1]",
                spec.t
            )));
        }
        transform = beam_splitter_symplectic(spec.t, 0, 2, n_modes)?
            * beam_splitter_symplectic(spec.t, 1, 3, n_modes)?
            * transform;
    }

    let k = readouts.len();
    let mut selector = DMatrix::zeros(k, dim);
    for (row, &idx) in readouts.iter().enumerate() {
        selector[(row, idx)] = 1.0;
    }

    let propagate = &selector * &transform;
    let mean_map = &propagate * mean_of_theta;
    let noise = &propagate * cov * propagate.transpose();
    let noise_inv = noise
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("outcome covariance not positive definite".into()))?
        .inverse();
    let normal = mean_map.transpose() * &noise_inv * &mean_map;
    let normal_inv = normal
        .try_inverse()
        .ok_or_else(|| Error::Numerical("mean map loses both parameters".into()))?;
    let weights = normal_inv * mean_map.transpose() * &noise_inv;
    let noise_chol = noise
        .cholesky()
        .ok_or_else(|| Error::Numerical("outcome covariance not positive definite".into()))?
        .l();

    Ok(ReadoutModel { mean_map, noise_chol, weights })
}

/// Sum of estimator variances predicted by the readout model (no
/// sampling); the Monte Carlo MSE converges to this.
pub fn predicted_mse(spec: &CircuitSpec) -> Result<f64> {
    let model = build_readout(spec)?;
    let noise = &model.noise_chol * model.noise_chol.transpose();
    Ok((&model.weights * noise * model.weights.transpose()).trace())
}

#[derive(Default, Clone)]
struct BatchAccum {
    mean1: KahanSum,
    mean2: KahanSum,
    sq: KahanSum,
    sq2: KahanSum,
}

/// Runs the simulation and reports empirical estimator statistics.
/// Deterministic for identical specs, independent of parallelism.
pub fn simulate(spec: &CircuitSpec) -> Result<SimulationResult> {
    let model = build_readout(spec)?;
    let theta = DVector::from_vec(vec![spec.theta.0, spec.theta.1]);
    let outcome_mean = &model.mean_map * &theta;
    let k = outcome_mean.len();

    let n_batches = spec.shots.div_ceil(BATCH_SIZE);
    let batches: Vec<BatchAccum> = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
            rng.set_stream(batch);
            let in_batch = BATCH_SIZE.min(spec.shots - batch * BATCH_SIZE);
            let mut acc = BatchAccum::default();
            let mut noise = DVector::zeros(k);
            for _ in 0..in_batch {
                for entry in noise.iter_mut() {
                    *entry = StandardNormal.sample(&mut rng);
                }
                let outcome = &outcome_mean + &model.noise_chol * &noise;
                let estimate = &model.weights * &outcome;
                let e1 = estimate[0] - theta[0];
                let e2 = estimate[1] - theta[1];
                let sq = e1 * e1 + e2 * e2;
                acc.mean1.add(estimate[0]);
                acc.mean2.add(estimate[1]);
                acc.sq.add(sq);
                acc.sq2.add(sq * sq);
            }
            acc
        })
        .collect();

    let mut total = BatchAccum::default();
    for b in &batches {
        total.mean1.merge(&b.mean1);
        total.mean2.merge(&b.mean2);
        total.sq.merge(&b.sq);
        total.sq2.merge(&b.sq2);
    }

    let n = spec.shots as f64;
    let mse = total.sq.value() / n;
    let var_of_sq = (total.sq2.value() / n - mse * mse).max(0.0);
    Ok(SimulationResult {
        empirical_mean: (total.mean1.value() / n, total.mean2.value() / n),
        empirical_mse_sum: mse,
        standard_error: (var_of_sq / n).sqrt(),
        shots_used: spec.shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::holevo_bound_closed;
    use crate::gaussian_model::omega;
    use crate::optimal_measurement::optimal_t;

    #[test]
    fn beam_splitter_is_symplectic() {
        for t in [0.0, 0.3, 0.5, 0.77, 1.0] {
            let s = beam_splitter_symplectic(t, 0, 1, 3).unwrap();
            let om = omega(3);
            assert!(
                ((&s * &om * s.transpose()) - &om).amax() < 1e-14,
                "symplectic violation at t={t}"
            );
        }
        let id = beam_splitter_symplectic(1.0, 0, 1, 2).unwrap();
        assert_eq!((id - DMatrix::<f64>::identity(4, 4)).amax(), 0.0);
        assert!(beam_splitter_symplectic(1.2, 0, 1, 2).is_err());
        assert!(beam_splitter_symplectic(0.5, 1, 1, 2).is_err());
    }

    #[test]
    fn balanced_splitter_decouples_the_probe() {
        let (v, r) = (0.8, 0.4);
        let ch = v * (2.0f64 * r).cosh();
        let sh = v * (2.0f64 * r).sinh();
        let mut cov = DMatrix::from_diagonal(&DVector::from_element(4, ch));
        cov[(0, 2)] = -sh;
        cov[(2, 0)] = -sh;
        cov[(1, 3)] = sh;
        cov[(3, 1)] = sh;
        let s = beam_splitter_symplectic(0.5, 0, 1, 2).unwrap();
        let out = &s * cov * s.transpose();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![
            v * (-2.0 * r).exp(),
            v * (2.0 * r).exp(),
            v * (2.0 * r).exp(),
            v * (-2.0 * r).exp(),
        ]));
        assert!((out - expected).amax() < 1e-13);
    }

    #[test]
    fn predicted_mse_matches_closed_forms() {
        // double homodyne above threshold attains the bound
        let spec = CircuitSpec {
            scheme: Scheme::DoubleHomodyne,
            v: 0.75,
            r: 0.5,
            t: 1.0,
            theta: (0.0, 0.0),
            shots: 1,
            seed: 0,
        };
        let predicted = predicted_mse(&spec).unwrap();
        assert!((predicted - holevo_bound_closed(0.75, 0.5)).abs() < 1e-12);

        // unbalanced heterodyne at the optimal transmission attains it below
        let (v, r) = (0.75, 0.1);
        let spec = CircuitSpec {
            scheme: Scheme::DoubleUnbalancedHeterodyne,
            v,
            r,
            t: optimal_t(v, r),
            theta: (0.0, 0.0),
            shots: 1,
            seed: 0,
        };
        let predicted = predicted_mse(&spec).unwrap();
        assert!(
            (predicted - holevo_bound_closed(v, r)).abs() < 1e-12,
            "het predicted {predicted} vs bound {}",
            holevo_bound_closed(v, r)
        );

        // double homodyne below threshold is strictly worse
        let spec = CircuitSpec {
            scheme: Scheme::DoubleHomodyne,
            v,
            r,
            t: 1.0,
            theta: (0.0, 0.0),
            shots: 1,
            seed: 0,
        };
        let predicted = predicted_mse(&spec).unwrap();
        assert!((predicted - 4.0 * v * (-2.0 * r).exp()).abs() < 1e-12);
        assert!(predicted > holevo_bound_closed(v, r) + 0.05);
    }

    #[test]
    fn simulation_is_seed_deterministic() {
        let spec = CircuitSpec {
            scheme: Scheme::DoubleUnbalancedHeterodyne,
            v: 0.75,
            r: 0.1,
            t: optimal_t(0.75, 0.1),
            theta: (0.3, -0.2),
            shots: 200_000,
            seed: 7,
        };
        let a = simulate(&spec).unwrap();
        let b = simulate(&spec).unwrap();
        assert_eq!(a.empirical_mse_sum.to_bits(), b.empirical_mse_sum.to_bits());
        assert_eq!(a.empirical_mean.0.to_bits(), b.empirical_mean.0.to_bits());
        assert_eq!(a.standard_error.to_bits(), b.standard_error.to_bits());

        let mut spec2 = spec.clone();
        spec2.seed = 8;
        let c = simulate(&spec2).unwrap();
        assert_ne!(a.empirical_mse_sum.to_bits(), c.empirical_mse_sum.to_bits());
    }

    #[test]
    fn empirical_mse_attains_bound_within_noise() {
        let (v, r) = (0.75, 0.5);
        let spec = CircuitSpec {
            scheme: Scheme::DoubleHomodyne,
            v,
            r,
            t: 1.0,
            theta: (0.3, -0.2),
            shots: 300_000,
            seed: 42,
        };
        let res = simulate(&spec).unwrap();
        let bound = holevo_bound_closed(v, r);
        assert!(
            (res.empirical_mse_sum - bound).abs() < 5.0 * res.standard_error,
            "mse {} vs bound {bound} (se {})",
            res.empirical_mse_sum,
            res.standard_error
        );
        // unbiasedness within statistics
        let se_mean = (res.empirical_mse_sum / 2.0 / spec.shots as f64).sqrt();
        assert!((res.empirical_mean.0 - 0.3).abs() < 5.0 * se_mean);
        assert!((res.empirical_mean.1 + 0.2).abs() < 5.0 * se_mean);
    }

    #[test]
    fn standard_error_shrinks_with_sqrt_shots() {
        let base = CircuitSpec {
            scheme: Scheme::DoubleHomodyne,
            v: 0.75,
            r: 0.5,
            t: 1.0,
            theta: (0.0, 0.0),
            shots: 10_000,
            seed: 3,
        };
        let small = simulate(&base).unwrap();
        let mut big_spec = base.clone();
        big_spec.shots = 160_000;
        let big = simulate(&big_spec).unwrap();
        let ratio = small.standard_error / big.standard_error;
        assert!((2.5..6.0).contains(&ratio), "sqrt(16) = 4 expected, got {ratio}");
    }

    #[test]
    fn heterodyne_requires_valid_transmission() {
        let spec = CircuitSpec {
            scheme: Scheme::DoubleUnbalancedHeterodyne,
            v: 0.75,
            r: 0.1,
            t: 1.3,
            theta: (0.0, 0.0),
            shots: 10,
            seed: 0,
        };
        assert!(matches!(simulate(&spec), Err(Error::Input(_))));
    }
}
