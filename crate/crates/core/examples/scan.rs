// temporary diagnostic
use holevo_core::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn rotation(phi: f64, mode: usize, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n, 2 * n);
    let (c, s) = (phi.cos(), phi.sin());
    let i = 2 * mode;
    m[(i, i)] = c; m[(i, i + 1)] = s; m[(i + 1, i)] = -s; m[(i + 1, i + 1)] = c;
    m
}
fn squeeze(s: f64, mode: usize, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n, 2 * n);
    let i = 2 * mode;
    m[(i, i)] = (-s).exp(); m[(i + 1, i + 1)] = s.exp();
    m
}
fn random_probe(rng: &mut ChaCha12Rng, n: usize, l: usize) -> ProbeModel {
    let d = 2 * n;
    let mut m = DMatrix::identity(d, d);
    for _ in 0..2 {
        for mode in 0..n {
            m = rotation(rng.random_range(0.0..std::f64::consts::TAU), mode, n) * m;
            m = squeeze(rng.random_range(-0.5..0.5), mode, n) * m;
        }
        for a in 0..n { for b in (a + 1)..n {
            m = beam_splitter_symplectic(rng.random_range(0.1..0.9), a, b, n).unwrap() * m;
        }}
    }
    let nus: Vec<f64> = (0..n).map(|_| rng.random_range(0.6..1.8)).collect();
    let diag = nalgebra::DVector::from_iterator(d, (0..d).map(|i| nus[i / 2]));
    let cov = &m * DMatrix::from_diagonal(&diag) * m.transpose();
    loop {
        let coeffs = DMatrix::from_fn(l, d, |_, _| rng.random_range(-1.0..1.0));
        if let Ok(p) = ProbeModel::new(cov.clone(), coeffs) { return p; }
    }
}

fn main() {
    env_logger::init();
    let mut fails = 0;
    for seed in 0u64..200 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let probe = random_probe(&mut rng, 2, 2);
        let frame_a = orthonormal_frame(&probe).unwrap();
        let raw = DMatrix::<f64>::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        let q = raw.qr().q();
        let frame_b = orthonormal_frame_with_basis(&probe, &frame_a.basis * q).unwrap();
        for (tag, fr) in [("chol", &frame_a), ("rot", &frame_b)] {
            match holevo_bound(fr, 1e-8) {
                Ok(_) => {}
                Err(Error::Convergence { gap, best, .. }) => { fails += 1; println!("seed {seed} [{tag}]: gap {gap:.3e} value {:.4}", best.dual_value); }
                Err(e) => { fails += 1; println!("seed {seed} [{tag}]: {e}"); }
            }
        }
    }
    println!("total failures: {fails}/400");
}
// (appended diagnostics in main via env var)
