//! Shared generators for the integration suites.
#![allow(dead_code)]

use holevo_core::{beam_splitter_symplectic, ProbeModel};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub fn rotation_symplectic(phi: f64, mode: usize, n_modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let (c, s) = (phi.cos(), phi.sin());
    let i = 2 * mode;
    m[(i, i)] = c;
    m[(i, i + 1)] = s;
    m[(i + 1, i)] = -s;
    m[(i + 1, i + 1)] = c;
    m
}

pub fn squeeze_symplectic(s: f64, mode: usize, n_modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let i = 2 * mode;
    m[(i, i)] = (-s).exp();
    m[(i + 1, i + 1)] = s.exp();
    m
}

/// Random symplectic transformation built from rotations, squeezers, and
/// beam splitters (symplectic by construction, moderate condition number).
pub fn random_symplectic(rng: &mut ChaCha12Rng, n_modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for _ in 0..2 {
        for mode in 0..n_modes {
            m = rotation_symplectic(rng.random_range(0.0..std::f64::consts::TAU), mode, n_modes)
                * m;
            m = squeeze_symplectic(rng.random_range(-0.5..0.5), mode, n_modes) * m;
        }
        for a in 0..n_modes {
            for b in (a + 1)..n_modes {
                m = beam_splitter_symplectic(rng.random_range(0.1..0.9), a, b, n_modes).unwrap()
                    * m;
            }
        }
    }
    m
}

/// Random valid probe, strictly inside the quantum-covariance cone
/// (symplectic eigenvalues at least 0.6) with full-rank mean coefficients.
pub fn random_probe(rng: &mut ChaCha12Rng, n_modes: usize, n_params: usize) -> ProbeModel {
    let d = 2 * n_modes;
    let s = random_symplectic(rng, n_modes);
    let nus: Vec<f64> = (0..n_modes).map(|_| rng.random_range(0.6..1.8)).collect();
    let diag = DVector::from_iterator(d, (0..d).map(|i| nus[i / 2]));
    let cov = &s * DMatrix::from_diagonal(&diag) * s.transpose();
    loop {
        let coeffs = DMatrix::from_fn(n_params, d, |_, _| rng.random_range(-1.0..1.0));
        if let Ok(p) = ProbeModel::new(cov.clone(), coeffs) {
            return p;
        }
    }
}

pub fn seeded(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}
