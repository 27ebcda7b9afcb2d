//! Dense Hermitian diagonalization, eigen-residuals, Rayleigh quotients and
//! the variational stationarity of eigenvalues.
//!
//! Eigenvectors are stored as columns sampled on the full grid and are
//! orthonormal under the grid quadrature. On Dirichlet grids only the
//! interior block is diagonalized, so a decomposition has `grid.active_len()`
//! eigenpairs.

use std::cmp::Ordering;

use faer::{Col, Mat, MatRef, Side};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_len, Error, Result};
use crate::grid::Grid;
use crate::quantum::{HermitianOperator, WaveFunction};

/// Largest grid accepted by [`diagonalize`].
pub const MAX_DENSE_DIM: usize = 2048;

/// Relative gap below which neighbouring eigenvalues form one cluster.
const CLUSTER_GAP: f64 = 1e-8;

/// Number of random directions used by [`stationarity_check`].
pub const STATIONARITY_DIRECTIONS: usize = 20;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    grid: Grid,
    eigenvalues: Vec<f64>,
    vectors: Mat<Complex64>,
}

impl SpectralDecomposition {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, j: usize) -> Result<f64> {
        self.eigenvalues
            .get(j)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: j,
                len: self.len(),
            })
    }

    /// Columns are grid samples of the eigenvectors.
    pub fn vectors(&self) -> MatRef<'_, Complex64> {
        self.vectors.as_ref()
    }

    pub fn eigenvector(&self, j: usize) -> Result<WaveFunction> {
        if j >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.len(),
            });
        }
        let values = (0..self.grid.n()).map(|i| self.vectors[(i, j)]).collect();
        WaveFunction::new(self.grid.clone(), values)
    }

    /// `max |⟨φ_i, φ_j⟩ − δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.vectors.adjoint() * &self.vectors;
        let h = self.grid.spacing();
        let m = self.len();
        let mut err = 0.0f64;
        for j in 0..m {
            for i in 0..m {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((gram[(i, j)] * h - target).norm());
            }
        }
        err
    }

    /// `max |f̂ − ΦΛΦ†| / max |f̂|` over matrix entries.
    pub fn reconstruction_error(&self, op: &HermitianOperator) -> Result<f64> {
        if op.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let h = self.grid.spacing();
        let n = self.grid.n();
        let scaled = Mat::from_fn(n, self.len(), |i, j| self.vectors[(i, j)] * (self.eigenvalues[j] * h));
        let rebuilt = &scaled * self.vectors.adjoint();
        let m = op.matrix();
        let mut err = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                err = err.max((m[(i, j)] - rebuilt[(i, j)]).norm());
            }
        }
        let scale = op.max_norm();
        Ok(if scale > 0.0 { err / scale } else { err })
    }

    /// `Σ c_i φ_i`.
    pub fn reconstruct(&self, coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.len(), coefficients.len())?;
        let c = Col::from_fn(coefficients.len(), |i| coefficients[i]);
        let v = &self.vectors * &c;
        Ok((0..v.nrows()).map(|i| v[i]).collect())
    }
}

/// Diagonalizes a Hermitian operator.
pub fn diagonalize(op: &HermitianOperator) -> Result<SpectralDecomposition> {
    let grid = op.grid().clone();
    if grid.n() > MAX_DENSE_DIM {
        return Err(Error::Domain(format!(
            "dense diagonalization is limited to {MAX_DENSE_DIM} points, got {}",
            grid.n()
        )));
    }
    let active = grid.active_range();
    let offset = active.start;
    let m = active.len();
    let full = op.matrix();

    let (values, block): (Vec<f64>, Mat<Complex64>) = if op.is_real() {
        let a = Mat::from_fn(m, m, |i, j| full[(i + offset, j + offset)].re);
        let evd = a
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Convergence(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        (
            (0..m).map(|i| s[i]).collect(),
            Mat::from_fn(m, m, |i, j| Complex64::new(u[(i, j)], 0.0)),
        )
    } else {
        let a = Mat::from_fn(m, m, |i, j| full[(i + offset, j + offset)]);
        let evd = a
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Convergence(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let mut values = Vec::with_capacity(m);
        for i in 0..m {
            let z: Complex64 = s[i];
            if z.im.abs() > 1e-9 {
                return Err(Error::Convergence(format!(
                    "eigenvalue {i} has imaginary part {:e}",
                    z.im
                )));
            }
            values.push(z.re);
        }
        (values, evd.U().to_owned())
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Convergence("non-finite eigenvalue".into()));
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut columns: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&j| (0..m).map(|i| block[(i, j)]).collect())
        .collect();
    let eigenvalues: Vec<f64> = order.iter().map(|&j| values[j]).collect();

    let gap_tol = CLUSTER_GAP * op.max_norm();
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && eigenvalues[end] - eigenvalues[end - 1] < gap_tol {
            end += 1;
        }
        if end - start > 1 {
            orthonormalize(&mut columns[start..end]);
        }
        columns[start..end].iter_mut().for_each(|c| fix_phase(c));
        if end - start > 1 {
            columns[start..end].sort_by(|a, b| lexicographic(a, b));
        }
        start = end;
    }

    let scale = 1.0 / grid.spacing().sqrt();
    let vectors = Mat::from_fn(grid.n(), m, |i, j| {
        if active.contains(&i) {
            columns[j][i - offset] * scale
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(SpectralDecomposition {
        grid,
        eigenvalues,
        vectors,
    })
}

fn orthonormalize(columns: &mut [Vec<Complex64>]) {
    for k in 0..columns.len() {
        let (done, rest) = columns.split_at_mut(k);
        let v = &mut rest[0];
        for u in done.iter() {
            let proj: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(b, a)| *b -= proj * a);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
    }
}

/// Rotates the last dominant component onto the positive real axis, so bound
/// states are positive toward the right edge like Hermite functions.
fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().rev().find(|z| z.norm() >= 0.5 * max).copied() {
        let rot = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= rot);
    }
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> Ordering {
    let key = |x: f64| (x * 1e10).round();
    for (x, y) in a.iter().zip(b) {
        let ord = key(y.norm())
            .total_cmp(&key(x.norm()))
            .then(key(x.re).total_cmp(&key(y.re)))
            .then(key(x.im).total_cmp(&key(y.im)));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Quadrature norm of `(f̂ − f)φ`.
pub fn eigen_residual(op: &HermitianOperator, phi: &WaveFunction, value: f64) -> Result<f64> {
    if op.grid() != phi.grid() {
        return Err(Error::GridMismatch);
    }
    let fphi = op.apply(phi.values())?;
    let r: Vec<Complex64> = fphi
        .iter()
        .zip(phi.values())
        .map(|(f, p)| f - value * p)
        .collect();
    phi.grid().norm(&r)
}

/// `⟨Ψ|f̂|Ψ⟩ / ⟨Ψ|Ψ⟩` for an unnormalized state. Pinned Dirichlet samples are
/// ignored.
pub fn rayleigh_quotient(op: &HermitianOperator, psi: &[Complex64]) -> Result<f64> {
    let grid = op.grid();
    check_len(grid.n(), psi.len())?;
    let mut v = psi.to_vec();
    for (i, z) in v.iter_mut().enumerate() {
        if grid.is_pinned(i) {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    let denom = grid.norm(&v)?.powi(2);
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let fv = op.apply(&v)?;
    Ok(grid.inner_product(&v, &fv)?.re / denom)
}

/// `c_i = ⟨φ_i, Ψ⟩`.
pub fn expand_in_basis(psi: &WaveFunction, dec: &SpectralDecomposition) -> Result<Vec<Complex64>> {
    if psi.grid() != dec.grid() {
        return Err(Error::GridMismatch);
    }
    let v = psi.values();
    let col = Col::from_fn(v.len(), |i| v[i]);
    let c = dec.vectors.adjoint() * &col;
    let h = dec.grid.spacing();
    Ok((0..c.nrows()).map(|i| c[i] * h).collect())
}

/// Outcome of perturbing an eigenvector and re-evaluating the Rayleigh
/// quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityProbe {
    pub scale: f64,
    /// `max |RQ(φ_j + εη) − f_j|` over the probed directions.
    pub max_shift: f64,
    /// `max_shift / ε²`; stays bounded as `ε → 0` at a stationary point.
    pub curvature: f64,
}

/// Random unit direction (quadrature norm) orthogonal to eigenvector `index`.
pub fn random_orthogonal_direction<R: Rng + ?Sized>(
    dec: &SpectralDecomposition,
    index: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let phi = dec.eigenvector(index)?;
    let grid = dec.grid();
    let mut eta: Vec<Complex64> = (0..grid.n())
        .map(|i| {
            if grid.is_pinned(i) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            }
        })
        .collect();
    let proj = grid.inner_product(phi.values(), &eta)?;
    eta.iter_mut()
        .zip(phi.values())
        .for_each(|(e, p)| *e -= proj * p);
    let norm = grid.norm(&eta)?;
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    eta.iter_mut().for_each(|e| *e /= norm);
    Ok(eta)
}

/// Signed shift `RQ(φ_j + εη) − f_j` for a given direction `η`.
pub fn rayleigh_shift(
    op: &HermitianOperator,
    dec: &SpectralDecomposition,
    index: usize,
    direction: &[Complex64],
    scale: f64,
) -> Result<f64> {
    let phi = dec.eigenvector(index)?;
    check_len(phi.values().len(), direction.len())?;
    let perturbed: Vec<Complex64> = phi
        .values()
        .iter()
        .zip(direction)
        .map(|(p, e)| p + scale * e)
        .collect();
    let psi = WaveFunction::new(dec.grid().clone(), perturbed)?;
    Ok(rayleigh_quotient(op, psi.values())? - dec.eigenvalue(index)?)
}

/// Probes stationarity of eigenpair `index` along the supplied directions.
pub fn stationarity_check_along(
    op: &HermitianOperator,
    dec: &SpectralDecomposition,
    index: usize,
    scale: f64,
    directions: &[Vec<Complex64>],
) -> Result<StationarityProbe> {
    if !(scale > 0.0 && scale <= 1e-2) {
        return Err(Error::Domain(format!(
            "perturbation scale must lie in (0, 1e-2], got {scale}"
        )));
    }
    if index >= dec.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: dec.len(),
        });
    }
    let mut max_shift = 0.0f64;
    for eta in directions {
        max_shift = max_shift.max(rayleigh_shift(op, dec, index, eta, scale)?.abs());
    }
    Ok(StationarityProbe {
        scale,
        max_shift,
        curvature: max_shift / (scale * scale),
    })
}

/// Perturbs eigenvector `index` by `ε·η` along [`STATIONARITY_DIRECTIONS`]
/// random directions orthogonal to it.
pub fn stationarity_check<R: Rng + ?Sized>(
    op: &HermitianOperator,
    dec: &SpectralDecomposition,
    index: usize,
    scale: f64,
    rng: &mut R,
) -> Result<StationarityProbe> {
    if index >= dec.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: dec.len(),
        });
    }
    let directions = (0..STATIONARITY_DIRECTIONS)
        .map(|_| random_orthogonal_direction(dec, index, rng))
        .collect::<Result<Vec<_>>>()?;
    stationarity_check_along(op, dec, index, scale, &directions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oscillator(n: usize, half_width: f64) -> HermitianOperator {
        let g = Grid::uniform(-half_width, half_width, n, Boundary::Dirichlet).unwrap();
        let d2 = g.derivative_matrix(2).unwrap();
        let x = g.points();
        let m = Mat::from_fn(n, n, |i, j| {
            -0.5 * d2[(i, j)] + if i == j { 0.5 * x[i] * x[i] } else { 0.0 }
        });
        HermitianOperator::from_real(g, &m).unwrap()
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let g = Grid::uniform(0.0, 1.0, 8, Boundary::Periodic).unwrap();
        let op =
            HermitianOperator::diagonal(g, &[1.0, -1.0, 3.0, 2.5, 4.0, 5.0, 6.0, 7.0]).unwrap();
        let dec = diagonalize(&op).unwrap();
        assert_eq!(&dec.eigenvalues()[..2], &[-1.0, 1.0]);
        assert!(dec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn oscillator_levels() {
        let op = oscillator(512, 10.0);
        let dec = diagonalize(&op).unwrap();
        assert_eq!(dec.len(), 510);
        for k in 0..8 {
            let exact = k as f64 + 0.5;
            let rel = (dec.eigenvalues()[k] - exact).abs() / exact;
            assert!(rel < 1e-3, "level {k}: {}", dec.eigenvalues()[k]);
        }
        assert!(dec.orthonormality_error() < 1e-8);
        assert!(dec.reconstruction_error(&op).unwrap() < 1e-8);
    }

    #[test]
    fn complex_hermitian_path() {
        let g = Grid::uniform(0.0, 1.0, 16, Boundary::Periodic).unwrap();
        let p = crate::quantum::momentum_operator(&g, 1.0);
        let dec = diagonalize(&p).unwrap();
        assert!(dec.orthonormality_error() < 1e-10);
        assert!(dec.reconstruction_error(&p).unwrap() < 1e-10);
        // Discrete momenta are sin(k h)/h for the central difference.
        let h = g.spacing();
        let mut expected: Vec<f64> = (0..16)
            .map(|m| (2.0 * std::f64::consts::PI * m as f64 / 16.0).sin() / h)
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in dec.eigenvalues().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_cluster_stays_orthonormal() {
        let g = Grid::uniform(0.0, 1.0, 10, Boundary::Periodic).unwrap();
        let op = HermitianOperator::diagonal(
            g,
            &[2.0, 1.0, 2.0, 3.0, 2.0, 0.0, 5.0, 6.0, 7.0, 8.0],
        )
        .unwrap();
        let dec = diagonalize(&op).unwrap();
        assert_eq!(&dec.eigenvalues()[..5], &[0.0, 1.0, 2.0, 2.0, 2.0]);
        assert!(dec.orthonormality_error() < 1e-12);
        assert!(dec.reconstruction_error(&op).unwrap() < 1e-12);
        let again = diagonalize(&op).unwrap();
        assert_eq!(dec.vectors(), again.vectors());
    }

    #[test]
    fn eigen_residual_cases() {
        let op = oscillator(256, 8.0);
        let dec = diagonalize(&op).unwrap();
        let phi0 = dec.eigenvector(0).unwrap();
        assert!(eigen_residual(&op, &phi0, dec.eigenvalues()[0]).unwrap() < 1e-8 * op.max_norm());
        let f1 = dec.eigenvalues()[1];
        let r = eigen_residual(&op, &phi0, f1).unwrap();
        assert!((r - (f1 - dec.eigenvalues()[0])).abs() < 1e-8);
    }

    #[test]
    fn residual_squared_is_variance() {
        let g = Grid::uniform(-3.0, 3.0, 48, Boundary::Dirichlet).unwrap();
        let op = oscillator(48, 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let raw: Vec<Complex64> = (0..48)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let psi = WaveFunction::new(g.clone(), raw).unwrap();
        let rq = rayleigh_quotient(&op, psi.values()).unwrap();
        let r = eigen_residual(&op, &psi, rq).unwrap();
        // Independent route: <Ψ|F²|Ψ> from the explicit matrix square.
        let f2 = op.matrix() * op.matrix();
        let v = psi.values();
        let f2v: Vec<Complex64> = (0..48).map(|i| (0..48).map(|j| f2[(i, j)] * v[j]).sum()).collect();
        let second = g.inner_product(v, &f2v).unwrap().re;
        assert!((r * r - (second - rq * rq)).abs() < 1e-9 * second);
    }

    #[test]
    fn rayleigh_quotient_cases() {
        let op = oscillator(128, 6.0);
        let dec = diagonalize(&op).unwrap();
        let phi2 = dec.eigenvector(2).unwrap();
        assert!((rayleigh_quotient(&op, phi2.values()).unwrap() - dec.eigenvalues()[2]).abs() < 1e-9);
        let mix: Vec<Complex64> = dec
            .eigenvector(0)
            .unwrap()
            .values()
            .iter()
            .zip(dec.eigenvector(1).unwrap().values())
            .map(|(a, b)| (a + b) / 2f64.sqrt())
            .collect();
        let expected = 0.5 * (dec.eigenvalues()[0] + dec.eigenvalues()[1]);
        assert!((rayleigh_quotient(&op, &mix).unwrap() - expected).abs() < 1e-9);
        let id = HermitianOperator::identity(op.grid().clone());
        assert!((rayleigh_quotient(&id, &mix).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            rayleigh_quotient(&op, &vec![Complex64::new(0.0, 0.0); 128]),
            Err(Error::ZeroNorm)
        );
    }

    #[test]
    fn two_level_rayleigh_shift_is_exact() {
        let op = oscillator(128, 6.0);
        let dec = diagonalize(&op).unwrap();
        let eps = 1e-3;
        for (j, k) in [(0, 1), (0, 5), (3, 1)] {
            let eta = dec.eigenvector(k).unwrap().into_values();
            let shift = rayleigh_shift(&op, &dec, j, &eta, eps).unwrap();
            let f = dec.eigenvalues();
            let expected = eps * eps * (f[k] - f[j]) / (1.0 + eps * eps);
            assert!((shift - expected).abs() < 1e-9, "({j},{k}): {shift} vs {expected}");
        }
    }

    #[test]
    fn stationarity_is_second_order() {
        let op = oscillator(256, 8.0);
        let dec = diagonalize(&op).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dirs: Vec<_> = (0..STATIONARITY_DIRECTIONS)
            .map(|_| random_orthogonal_direction(&dec, 0, &mut rng).unwrap())
            .collect();
        let eps = 1e-3;
        let probe = stationarity_check_along(&op, &dec, 0, eps, &dirs).unwrap();
        let range = dec.eigenvalues().last().unwrap() - dec.eigenvalues()[0];
        assert!(probe.max_shift / eps < 1e-2 * range);
        let half = stationarity_check_along(&op, &dec, 0, eps / 2.0, &dirs).unwrap();
        let ratio = probe.max_shift / half.max_shift;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn stationarity_rejects_bad_input() {
        let op = oscillator(64, 5.0);
        let dec = diagonalize(&op).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            stationarity_check(&op, &dec, 500, 1e-3, &mut rng),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(stationarity_check(&op, &dec, 0, 0.5, &mut rng).is_err());
    }

    #[test]
    fn expansion_cases() {
        let op = oscillator(96, 6.0);
        let dec = diagonalize(&op).unwrap();
        let c = expand_in_basis(&dec.eigenvector(3).unwrap(), &dec).unwrap();
        for (i, ci) in c.iter().enumerate() {
            let target = if i == 3 { 1.0 } else { 0.0 };
            assert!((ci - target).norm() < 1e-8);
        }
        let i = Complex64::new(0.0, 1.0);
        let values: Vec<Complex64> = dec
            .eigenvector(0)
            .unwrap()
            .values()
            .iter()
            .zip(dec.eigenvector(1).unwrap().values())
            .map(|(a, b)| a + i * b)
            .collect();
        let psi = WaveFunction::new(op.grid().clone(), values).unwrap();
        let c = expand_in_basis(&psi, &dec).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((c[0] - s).norm() < 1e-8);
        assert!((c[1] - i * s).norm() < 1e-8);
        let rebuilt = dec.reconstruct(&c).unwrap();
        let diff: Vec<Complex64> = rebuilt.iter().zip(psi.values()).map(|(a, b)| a - b).collect();
        assert!(op.grid().norm(&diff).unwrap() < 1e-8);
    }

    #[test]
    fn rejects_oversized_grid() {
        let g = Grid::uniform(0.0, 1.0, MAX_DENSE_DIM + 1, Boundary::Periodic).unwrap();
        assert!(matches!(
            diagonalize(&HermitianOperator::zero(g)),
            Err(Error::Domain(_))
        ));
    }
}
