mod common;

use common::{dirichlet, seeded};
use proptest::prelude::*;
use qcorr_core::classical::{
    classical_quadratic_form, classical_quadratic_form_direct, classical_uncertainty_check,
    covariance, default_epsilon, variance, Verdict,
};
use qcorr_core::sampling::{random_density, random_observable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(seeded(200))]

    #[test]
    fn quadratic_form_is_nonnegative_and_relation_holds(seed in any::<u64>()) {
        let g = dirichlet(128, 5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&g, &mut rng).unwrap();
        let a = random_observable(&g, &mut rng);
        let b = random_observable(&g, &mut rng);
        let report = classical_uncertainty_check(&rho, &a, &b, default_epsilon(&g)).unwrap();
        prop_assert!(report.applicable);
        prop_assert!(report.lhs >= report.cross_term - 1e-9);
        prop_assert_eq!(report.verdict(), Verdict::Holds);
        for _ in 0..20 {
            let xi = rng.gen_range(-10.0..10.0);
            prop_assert!(classical_quadratic_form(&rho, &a, &b, xi).unwrap() >= -1e-9);
        }
    }
}

proptest! {
    #![proptest_config(seeded(64))]

    #[test]
    fn moment_form_matches_direct_average(seed in any::<u64>(), xi in -10.0..10.0f64) {
        let g = dirichlet(96, 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&g, &mut rng).unwrap();
        let a = random_observable(&g, &mut rng);
        let b = random_observable(&g, &mut rng);
        let moments = classical_quadratic_form(&rho, &a, &b, xi).unwrap();
        let direct = classical_quadratic_form_direct(&rho, &a, &b, xi).unwrap();
        prop_assert!((moments - direct).abs() <= 1e-9 * direct.abs().max(1.0));
    }

    #[test]
    fn scaling_is_equivariant(seed in any::<u64>(), c in prop_oneof![-8.0..-0.1f64, 0.1..8.0f64]) {
        let g = dirichlet(96, 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&g, &mut rng).unwrap();
        let a = random_observable(&g, &mut rng);
        let b = random_observable(&g, &mut rng);
        let ca = a.scaled(c);
        let va = variance(&rho, &a).unwrap();
        let cov = covariance(&rho, &a, &b).unwrap();
        prop_assert!((variance(&rho, &ca).unwrap() - c * c * va).abs() <= 1e-12 * (c * c * va).max(1.0));
        prop_assert!((covariance(&rho, &ca, &b).unwrap() - c * cov).abs() <= 1e-12 * (c * cov).abs().max(1.0));

        for eps in [0.5 * va, 2.0 * va] {
            let before = classical_uncertainty_check(&rho, &a, &b, eps).unwrap();
            let after = classical_uncertainty_check(&rho, &ca, &b, c * c * eps).unwrap();
            prop_assert_eq!(before.variance_a > eps, after.variance_a > c * c * eps);
            let cb = b.scaled(c);
            let both = classical_uncertainty_check(&rho, &ca, &cb, c * c * eps).unwrap();
            prop_assert_eq!(before.applicable, both.applicable);
        }
    }
}
