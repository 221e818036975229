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
fn main() {
    env_logger::init();
    let mut rng = ChaCha12Rng::seed_from_u64(198);
    let n = 2; let d = 4;
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
    let probe = loop {
        let coeffs = DMatrix::from_fn(2, d, |_, _| rng.random_range(-1.0..1.0));
        if let Ok(p) = ProbeModel::new(cov.clone(), coeffs) { break p; }
    };
    let frame = orthonormal_frame(&probe).unwrap();
    match holevo_bound(&frame, 1e-9) {
        Ok(b) => println!("OK sigma={} gap={:.3e}", b.sigma_star, b.certificate.gap),
        Err(e) => println!("ERR {e}"),
    }
}
