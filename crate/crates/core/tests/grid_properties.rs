mod common;

use common::seeded;
use num_complex::Complex64;
use proptest::prelude::*;
use qcorr_core::grid::{Boundary, Grid};

fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n)
}

proptest! {
    #![proptest_config(seeded(64))]

    #[test]
    fn quadrature_is_linear(
        u in samples(40),
        v in samples(40),
        a in -5.0..5.0f64,
        b in -5.0..5.0f64,
        periodic in any::<bool>(),
    ) {
        let boundary = if periodic { Boundary::Periodic } else { Boundary::Dirichlet };
        let g = Grid::uniform(-2.0, 3.0, 40, boundary).unwrap();
        let mixed: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = g.integrate(&mixed).unwrap();
        let rhs = a * g.integrate(&u).unwrap() + b * g.integrate(&v).unwrap();
        let scale = g.integrate(&u.iter().zip(&v).map(|(x, y)| (a * x).abs() + (b * y).abs()).collect::<Vec<_>>()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn complex_quadrature_is_linear(re in samples(32), im in samples(32), s in -3.0..3.0f64) {
        let g = Grid::uniform(0.0, 1.0, 32, Boundary::Dirichlet).unwrap();
        let z: Vec<Complex64> = re.iter().zip(&im).map(|(r, i)| Complex64::new(*r, *i)).collect();
        let scaled: Vec<Complex64> = z.iter().map(|w| w * s).collect();
        let lhs = g.integrate(&scaled).unwrap();
        let rhs = g.integrate(&z).unwrap() * s;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn periodic_first_derivative_is_antisymmetric(u in samples(48), v in samples(48)) {
        let g = Grid::uniform(0.0, 2.0, 48, Boundary::Periodic).unwrap();
        let d = g.derivative_matrix(1).unwrap();
        let apply = |w: &[f64]| -> Vec<f64> {
            (0..48).map(|i| (0..48).map(|j| d[(i, j)] * w[j]).sum()).collect()
        };
        let du = apply(&u);
        let dv = apply(&v);
        let lhs: Vec<f64> = (0..48).map(|i| du[i] * v[i] + u[i] * dv[i]).collect();
        prop_assert!(g.integrate(&lhs).unwrap().abs() < 1e-10);
    }
}
