mod common;

use common::{dirichlet, seeded};
use num_complex::Complex64;
use proptest::prelude::*;
use qcorr_core::dynamics::{build_hamiltonian, evolve, linearity_check, PhysicalConstants};
use qcorr_core::quantum::expectation;
use qcorr_core::sampling::random_wavefunction;
use qcorr_core::spectral::diagonalize;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn well(n: usize) -> qcorr_core::HermitianOperator {
    let g = dirichlet(n, 8.0);
    let v = g.sample(|x| 0.5 * x * x);
    build_hamiltonian(&g, &v, PhysicalConstants::atomic()).unwrap()
}

proptest! {
    #![proptest_config(seeded(8))]

    #[test]
    fn trajectories_keep_unit_norm(seed in any::<u64>()) {
        let h = well(96);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_wavefunction(h.grid(), &mut rng).unwrap();
        let traj = evolve(&psi, &h, 0.01, 200, PhysicalConstants::atomic()).unwrap();
        prop_assert!(traj.states().iter().all(|s| (s.norm() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn superposition_commutes_with_evolution(seed in any::<u64>()) {
        let h = well(96);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states: Vec<_> = (0..3).map(|_| random_wavefunction(h.grid(), &mut rng).unwrap()).collect();
        let coefficients: Vec<Complex64> = (0..3)
            .map(|_| Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let worst = linearity_check(&states, &coefficients, &h, 0.02, 50, PhysicalConstants::atomic()).unwrap();
        prop_assert!(worst < 1e-9, "distance {worst}");
    }
}

#[test]
fn energy_is_conserved_for_a_random_state() {
    let h = well(128);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let psi = random_wavefunction(h.grid(), &mut rng).unwrap();
    let e0 = expectation(&psi, &h).unwrap();
    let traj = evolve(&psi, &h, 0.01, 1000, PhysicalConstants::atomic()).unwrap();
    for s in traj.states() {
        assert!(((expectation(s, &h).unwrap() - e0) / e0).abs() < 1e-8);
    }
}

#[test]
fn stationary_phase_error_is_second_order_in_dt() {
    let h = well(128);
    let dec = diagonalize(&h).unwrap();
    let phi = dec.eigenvector(2).unwrap();
    let e = dec.eigenvalues()[2];
    let t_final = 2.0;
    let error = |steps: usize| {
        let dt = t_final / steps as f64;
        let traj = evolve(&phi, &h, dt, steps, PhysicalConstants::atomic()).unwrap();
        (traj.phase_against(&phi).unwrap().last().unwrap() + e * t_final).abs()
    };
    let (coarse, fine) = (error(100), error(200));
    let ratio = coarse / fine;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}
