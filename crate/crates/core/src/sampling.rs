//! Seeded random states, densities and observables for property checks and
//! randomized scenarios.

use faer::Mat;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::classical::{ClassicalObservable, ProbabilityDensity};
use crate::error::Result;
use crate::grid::Grid;
use crate::quantum::{HermitianOperator, WaveFunction};

/// Up to four Gaussian bumps with random centres, widths and weights.
fn bumps<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Vec<(f64, f64, f64)> {
    let count = rng.gen_range(1..=4);
    let (lo, extent) = (grid.x_min(), grid.extent());
    (0..count)
        .map(|_| {
            let center = lo + extent * rng.gen_range(0.2..0.8);
            let width = extent * rng.gen_range(0.03..0.15);
            let weight = rng.gen_range(0.2..1.0);
            (center, width, weight)
        })
        .collect()
}

/// Smooth positive density built from random Gaussian bumps.
pub fn random_density<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Result<ProbabilityDensity> {
    let bumps = bumps(grid, rng);
    ProbabilityDensity::from_fn(grid.clone(), |x| {
        bumps
            .iter()
            .map(|(c, w, a)| a * (-0.5 * ((x - c) / w).powi(2)).exp())
            .sum()
    })
}

/// Random quadratic-plus-sinusoid observable scaled to order one.
pub fn random_observable<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> ClassicalObservable {
    let mid = 0.5 * (grid.x_min() + grid.x_max());
    let half = 0.5 * grid.extent();
    let c: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let k = rng.gen_range(0.5..4.0);
    ClassicalObservable::from_fn(grid.clone(), |x| {
        let u = (x - mid) / half;
        c[0] + c[1] * u + c[2] * u * u + c[3] * (k * u).sin()
    })
}

/// Superposition of random Gaussian packets with random momenta and phases,
/// well inside the box.
pub fn random_wavefunction<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Result<WaveFunction> {
    let packets: Vec<_> = bumps(grid, rng)
        .into_iter()
        .map(|(c, w, a)| {
            let k = rng.gen_range(-3.0..3.0) / w;
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            (c, w, a, k, phase)
        })
        .collect();
    WaveFunction::from_fn(grid.clone(), |x| {
        packets
            .iter()
            .map(|&(c, w, a, k, phase)| {
                let env = a * (-0.25 * ((x - c) / w).powi(2)).exp();
                Complex64::from_polar(env, k * (x - c) + phase)
            })
            .sum()
    })
}

/// Dense random Hermitian matrix with unit-variance entries, scaled by
/// `1/√n`.
pub fn random_hermitian<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Result<HermitianOperator> {
    let n = grid.n();
    let scale = 1.0 / (n as f64).sqrt();
    let mut m = Mat::<Complex64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.sample::<f64, _>(StandardNormal) * scale, 0.0);
        for j in 0..i {
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                * (scale / std::f64::consts::SQRT_2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::new(grid.clone(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_seed_deterministic() {
        let g = Grid::uniform(-4.0, 4.0, 64, Boundary::Dirichlet).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (
                random_density(&g, &mut rng).unwrap().values().to_vec(),
                random_wavefunction(&g, &mut rng).unwrap().values().to_vec(),
            )
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    #[test]
    fn generated_objects_are_valid() {
        let g = Grid::uniform(-4.0, 4.0, 64, Boundary::Dirichlet).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random_density(&g, &mut rng).unwrap();
        assert!((g.integrate(rho.values()).unwrap() - 1.0).abs() < 1e-12);
        let psi = random_wavefunction(&g, &mut rng).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let a = random_hermitian(&g, &mut rng).unwrap();
        let m = a.matrix();
        for i in 0..g.n() {
            for j in 0..g.n() {
                assert_eq!(m[(i, j)], m[(j, i)].conj());
            }
        }
    }
}
