//! Property suites for the model, frame, and solver invariants.

mod common;

use common::{random_probe, seeded};
use holevo_core::{
    build_sdp, duan_sum, holevo_bound, is_entangled, orthonormal_frame,
    orthonormal_frame_with_basis, realify, solve, symmetric_tmst_probe, symplectic_form,
};
use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

fn dvec(values: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(values)
}

proptest! {
    #[test]
    fn symplectic_form_is_antisymmetric(
        a in proptest::collection::vec(-10.0..10.0f64, 6),
        b in proptest::collection::vec(-10.0..10.0f64, 6),
    ) {
        let (z, zp) = (dvec(&a), dvec(&b));
        let fwd = symplectic_form(&z, &zp).unwrap();
        let bwd = symplectic_form(&zp, &z).unwrap();
        prop_assert!((fwd + bwd).abs() <= 1e-12 * (1.0 + fwd.abs()));
    }

    #[test]
    fn riesz_vector_represents_the_functional(seed in 0u64..500, n_modes in 1usize..5) {
        let mut rng = seeded(seed);
        let probe = random_probe(&mut rng, n_modes, 2);
        let d = 2 * n_modes;
        let coeff = DVector::from_fn(d, |_, _| rng.random_range(-2.0..2.0));
        let z = DVector::from_fn(d, |_, _| rng.random_range(-2.0..2.0));
        let riesz = probe.riesz_vector(&coeff).unwrap();
        let via_alpha = (riesz.transpose() * probe.covariance() * &z)[(0, 0)];
        let direct = coeff.dot(&z);
        prop_assert!(
            (via_alpha - direct).abs() <= 1e-10 * (1.0 + direct.abs()),
            "alpha(riesz(c), z) = {via_alpha} vs c'z = {direct}"
        );
    }

    #[test]
    fn frames_are_orthonormal(seed in 0u64..500, n_modes in 1usize..5) {
        let mut rng = seeded(seed);
        let probe = random_probe(&mut rng, n_modes, 2);
        let frame = orthonormal_frame(&probe).unwrap();
        let d = 2 * n_modes;
        let gram = frame.basis.transpose() * probe.covariance() * &frame.basis;
        prop_assert!((gram - DMatrix::<f64>::identity(d, d)).amax() < 1e-12);

        // d_mat antisymmetric exactly, c_mat Hermitian positive definite
        prop_assert_eq!((&frame.d_mat + frame.d_mat.transpose()).amax(), 0.0);
        let c_re = frame.c_mat.map(|c| c.re);
        let c_im = frame.c_mat.map(|c| c.im);
        prop_assert!((&c_re - c_re.transpose()).amax() < 1e-14);
        prop_assert!((&c_im + c_im.transpose()).amax() < 1e-14);
        let eigs = realify(&frame.c_mat).unwrap().symmetric_eigen().eigenvalues;
        prop_assert!(eigs.min() > 0.0);
    }

    #[test]
    fn tmst_probes_pass_the_quantum_gate(v in 0.5f64..3.0, r in 0.0f64..2.0) {
        prop_assert!(symmetric_tmst_probe(v, r).is_ok());
    }

    #[test]
    fn realify_preserves_definiteness(seed in 0u64..500) {
        let mut rng = seeded(seed);
        let g = DMatrix::<f64>::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
        let a = DMatrix::<f64>::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
        let herm = DMatrix::from_fn(3, 3, |i, j| {
            Complex::new(
                0.5 * (g[(i, j)] + g[(j, i)]),
                0.5 * (a[(i, j)] - a[(j, i)]),
            )
        });
        // eigenvalues of the embedding are those of H, doubled
        let mut herm_eigs: Vec<f64> = realify(&herm)
            .unwrap()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        herm_eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for pair in herm_eigs.chunks(2) {
            prop_assert!((pair[0] - pair[1]).abs() < 1e-10);
        }

        let shift = herm_eigs[0].abs() + 0.1;
        let psd = &herm + DMatrix::<Complex<f64>>::identity(3, 3).scale(shift);
        let min = realify(&psd).unwrap().symmetric_eigen().eigenvalues.min();
        prop_assert!(min > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bound_is_frame_independent(seed in 0u64..200) {
        let mut rng = seeded(seed);
        let probe = random_probe(&mut rng, 2, 2);
        let frame_a = orthonormal_frame(&probe).unwrap();

        // any orthogonal rotation of a valid basis is another valid basis
        let raw = DMatrix::<f64>::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        let q = raw.qr().q();
        let frame_b = orthonormal_frame_with_basis(&probe, &frame_a.basis * q).unwrap();

        let overlap_a = &frame_a.m_mat * frame_a.m_mat.transpose();
        let overlap_b = &frame_b.m_mat * frame_b.m_mat.transpose();
        prop_assert!((overlap_a - overlap_b).amax() < 1e-10);

        let bound_a = holevo_bound(&frame_a, 1e-9).unwrap();
        let bound_b = holevo_bound(&frame_b, 1e-9).unwrap();
        prop_assert!(
            (bound_a.sigma_star - bound_b.sigma_star).abs() < 1e-8,
            "bounds differ across frames: {} vs {}",
            bound_a.sigma_star,
            bound_b.sigma_star
        );
    }

    #[test]
    fn random_solves_satisfy_strong_duality(seed in 1000u64..1100, n_modes in 2usize..4) {
        let mut rng = seeded(seed);
        let probe = random_probe(&mut rng, n_modes, 2);
        let frame = orthonormal_frame(&probe).unwrap();
        let solution = solve(&build_sdp(&frame), 1e-9).unwrap();
        prop_assert!(solution.gap.abs() <= 1e-8);
        prop_assert!(solution.gap >= -1e-8);
        prop_assert!(solution.dual_value > 0.0);
    }
}

#[test]
fn entanglement_threshold_matches_duan_criterion() {
    for v in [0.5, 0.75, 1.0, 2.0] {
        let r0 = 0.5 * (2.0 * v as f64).ln();
        let mut r = 0.0;
        while r <= 2.0 {
            assert_eq!(
                is_entangled(v, r),
                r > r0,
                "threshold mismatch at v={v}, r={r} (duan = {})",
                duan_sum(v, r)
            );
            r += 0.01;
        }
    }
}

#[test]
fn mse_is_independent_of_displacement() {
    use holevo_core::{simulate, CircuitSpec, Scheme};
    let base = CircuitSpec {
        scheme: Scheme::DoubleHomodyne,
        v: 0.75,
        r: 0.5,
        t: 1.0,
        theta: (0.0, 0.0),
        shots: 400_000,
        seed: 11,
    };
    let at_origin = simulate(&base).unwrap();
    let mut shifted_spec = base.clone();
    shifted_spec.theta = (3.0, -4.0);
    shifted_spec.seed = 12;
    let shifted = simulate(&shifted_spec).unwrap();
    let tol = 4.0 * (at_origin.standard_error + shifted.standard_error);
    assert!(
        (at_origin.empirical_mse_sum - shifted.empirical_mse_sum).abs() < tol,
        "Gaussian shift model: MSE must not depend on theta ({} vs {})",
        at_origin.empirical_mse_sum,
        shifted.empirical_mse_sum
    );

    // unbiased even for large displacements
    let se_mean = (shifted.empirical_mse_sum / 2.0 / shifted_spec.shots as f64).sqrt();
    assert!((shifted.empirical_mean.0 - 3.0).abs() < 4.0 * se_mean + 1e-6);
    assert!((shifted.empirical_mean.1 + 4.0).abs() < 4.0 * se_mean + 1e-6);
}
