mod common;

use common::{dirichlet, seeded};
use num_complex::Complex64;
use proptest::prelude::*;
use qcorr_core::classical::ClassicalObservable;
use qcorr_core::correspondence::{
    classical_limit_probe, coefficients_to_weights, cross_term_report, decoherence_factor,
    mixture_average, MixtureEnsemble,
};
use qcorr_core::dynamics::{build_hamiltonian, PhysicalConstants};
use qcorr_core::quantum::{density_from_wavefunction, position_operator};
use qcorr_core::spectral::diagonalize;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_coefficients(k: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..k)
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|z| z / norm).collect()
}

proptest! {
    #![proptest_config(seeded(16))]

    #[test]
    fn own_basis_average_is_a_mixture(seed in any::<u64>(), k in 2usize..8) {
        let g = dirichlet(80, 6.0);
        let v = g.sample(|x| 0.5 * x * x);
        let h = build_hamiltonian(&g, &v, PhysicalConstants::atomic()).unwrap();
        let dec = diagonalize(&h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_coefficients(k, &mut rng);
        let report = cross_term_report(&c, &dec, &h).unwrap();

        let densities = (0..k)
            .map(|j| density_from_wavefunction(&dec.eigenvector(j).unwrap()))
            .collect();
        let ensemble = MixtureEnsemble::new(
            coefficients_to_weights(&c).unwrap(),
            densities,
            dec.eigenvalues()[..k].to_vec(),
        )
        .unwrap();
        let mixture = mixture_average(&ensemble).unwrap();
        prop_assert!((report.quantum_average - mixture).abs() < 1e-8);
        prop_assert!(report.max_off_diagonal < 1e-8 * h.max_norm());
    }

    #[test]
    fn cross_term_matrix_is_hermitian(seed in any::<u64>(), k in 2usize..8) {
        let g = dirichlet(80, 6.0);
        let v = g.sample(|x| 0.5 * x * x);
        let dec = diagonalize(&build_hamiltonian(&g, &v, PhysicalConstants::atomic()).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_coefficients(k, &mut rng);
        let report = cross_term_report(&c, &dec, &position_operator(&g)).unwrap();
        let m = &report.off_diagonal;
        for i in 0..k {
            for j in 0..k {
                prop_assert!((m[(i, j)] - m[(j, i)].conj()).norm() < 1e-10);
            }
        }
        let split = report.classical_average + report.cross_contribution;
        prop_assert!((report.quantum_average - split).abs() < 1e-9);
    }

    #[test]
    fn decoherence_factors_integrate_to_zero(i in 0usize..20, j in 0usize..20) {
        prop_assume!(i != j);
        let g = dirichlet(64, 5.0);
        let v = g.sample(|x| x.powi(4) / 10.0);
        let dec = diagonalize(&build_hamiltonian(&g, &v, PhysicalConstants::atomic()).unwrap()).unwrap();
        prop_assert!(decoherence_factor(&dec, i, j).unwrap().integral.norm() < 1e-8);
    }

    #[test]
    fn classical_limit_gaps_do_not_grow(
        c in prop::array::uniform3(-2.0..2.0f64),
        x0 in -1.0..1.0f64,
    ) {
        let g = dirichlet(2001, 5.0);
        let f = ClassicalObservable::from_fn(g, |x| c[0] * x + c[1] * x * x + c[2] * (x - 0.3).powi(4));
        let probe = classical_limit_probe(&f, x0, &[0.4, 0.2, 0.1, 0.05]).unwrap();
        prop_assert!(probe.is_non_increasing(0.1), "{:?}", probe.gaps);
    }
}
