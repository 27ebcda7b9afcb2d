//! Uniform one-dimensional grids, quadrature, and finite-difference matrices.
//!
//! A [`Grid`] with [`Boundary::Dirichlet`] includes both endpoints, and the
//! two endpoint nodes are *pinned*: wavefunctions vanish there and operators
//! never couple to them. Periodic grids omit the duplicate right endpoint.

use std::iter::Sum;
use std::ops::{Mul, Range};

use faer::Mat;
use num_complex::Complex64;

use crate::error::{check_len, Error, Result};

/// Smallest number of grid points accepted by [`Grid::uniform`].
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Field vanishes outside `[x_min, x_max]`; endpoints are pinned to zero.
    Dirichlet,
    /// Field repeats with period `x_max - x_min`.
    Periodic,
}

/// Uniform discretization of the interval `[x_min, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    boundary: Boundary,
    spacing: f64,
}

impl Grid {
    pub fn uniform(x_min: f64, x_max: f64, n: usize, boundary: Boundary) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::Domain("grid bounds must be finite".into()));
        }
        if x_max <= x_min {
            return Err(Error::Domain(format!(
                "x_max ({x_max}) must exceed x_min ({x_min})"
            )));
        }
        if n < MIN_POINTS {
            return Err(Error::Domain(format!(
                "grid needs at least {MIN_POINTS} points, got {n}"
            )));
        }
        let spacing = match boundary {
            Boundary::Dirichlet => (x_max - x_min) / (n - 1) as f64,
            Boundary::Periodic => (x_max - x_min) / n as f64,
        };
        Ok(Self {
            x_min,
            x_max,
            n,
            boundary,
            spacing,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn extent(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Evaluates `f` at every grid point.
    pub fn sample<T>(&self, f: impl Fn(f64) -> T) -> Vec<T> {
        (0..self.n).map(|i| f(self.point(i))).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// True for the Dirichlet endpoint nodes.
    pub fn is_pinned(&self, i: usize) -> bool {
        self.boundary == Boundary::Dirichlet && (i == 0 || i + 1 == self.n)
    }

    /// Indices of the nodes that carry quantum degrees of freedom.
    pub fn active_range(&self) -> Range<usize> {
        match self.boundary {
            Boundary::Dirichlet => 1..self.n - 1,
            Boundary::Periodic => 0..self.n,
        }
    }

    pub fn active_len(&self) -> usize {
        self.active_range().len()
    }

    /// Quadrature weights: trapezoid for Dirichlet, uniform for periodic.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing;
        (0..self.n)
            .map(|i| match self.boundary {
                Boundary::Dirichlet if i == 0 || i + 1 == self.n => 0.5 * h,
                _ => h,
            })
            .collect()
    }

    /// Approximates the integral of sampled `values` over the grid.
    pub fn integrate<T>(&self, values: &[T]) -> Result<T>
    where
        T: Copy + Sum + Mul<f64, Output = T>,
    {
        check_len(self.n, values.len())?;
        let h = self.spacing;
        let last = self.n - 1;
        Ok(values
            .iter()
            .enumerate()
            .map(|(i, &v)| match self.boundary {
                Boundary::Dirichlet if i == 0 || i == last => v * (0.5 * h),
                _ => v * h,
            })
            .sum())
    }

    /// Quadrature inner product `∫ conj(u) v`.
    pub fn inner_product(&self, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
        check_len(self.n, u.len())?;
        check_len(self.n, v.len())?;
        let products: Vec<Complex64> = u.iter().zip(v).map(|(a, b)| a.conj() * b).collect();
        self.integrate(&products)
    }

    pub fn norm(&self, u: &[Complex64]) -> Result<f64> {
        check_len(self.n, u.len())?;
        let sq: Vec<f64> = u.iter().map(|z| z.norm_sqr()).collect();
        Ok(self.integrate(&sq)?.max(0.0).sqrt())
    }

    /// Second-order central-difference matrix for d/dx (`order = 1`) or
    /// d²/dx² (`order = 2`).
    ///
    /// Periodic rows wrap around. For Dirichlet grids the pinned endpoint
    /// rows and columns are zero, so the stencil of the first and last
    /// interior nodes sees a zero boundary value.
    pub fn derivative_matrix(&self, order: u8) -> Result<Mat<f64>> {
        let n = self.n;
        let h = self.spacing;
        let (off_lo, diag, off_hi) = match order {
            1 => (-0.5 / h, 0.0, 0.5 / h),
            2 => (1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)),
            other => return Err(Error::UnsupportedOrder(other)),
        };
        let mut d = Mat::<f64>::zeros(n, n);
        match self.boundary {
            Boundary::Periodic => {
                for i in 0..n {
                    d[(i, (i + n - 1) % n)] += off_lo;
                    d[(i, i)] += diag;
                    d[(i, (i + 1) % n)] += off_hi;
                }
            }
            Boundary::Dirichlet => {
                for i in 1..n - 1 {
                    if i > 1 {
                        d[(i, i - 1)] = off_lo;
                    }
                    d[(i, i)] = diag;
                    if i + 2 < n {
                        d[(i, i + 1)] = off_hi;
                    }
                }
            }
        }
        Ok(d)
    }
}

#[cfg(test)]
pub(crate) fn apply_real(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_spacing_and_points() {
        let g = Grid::uniform(0.0, 1.0, 11, Boundary::Dirichlet).unwrap();
        assert!((g.spacing() - 0.1).abs() < 1e-15);
        let pts = g.points();
        assert_eq!(pts.len(), 11);
        assert_eq!(pts[0], 0.0);
        assert!((pts[10] - 1.0).abs() < 1e-15);
        for w in pts.windows(2) {
            assert!(w[1] > w[0]);
            assert!((w[1] - w[0] - 0.1).abs() < 1e-14);
        }
    }

    #[test]
    fn periodic_excludes_duplicate_endpoint() {
        let g = Grid::uniform(-1.0, 1.0, 8, Boundary::Periodic).unwrap();
        assert_eq!(g.spacing(), 0.25);
        let pts = g.points();
        assert_eq!(pts.first(), Some(&-1.0));
        assert_eq!(pts.last(), Some(&0.75));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            Grid::uniform(0.0, 1.0, 4, Boundary::Dirichlet),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            Grid::uniform(1.0, 1.0, 16, Boundary::Dirichlet),
            Err(Error::Domain(_))
        ));
        assert!(Grid::uniform(2.0, 1.0, 16, Boundary::Periodic).is_err());
    }

    #[test]
    fn trapezoid_exact_on_constants_and_linears() {
        let g = Grid::uniform(0.0, 1.0, 101, Boundary::Dirichlet).unwrap();
        let ones = vec![1.0; 101];
        assert!((g.integrate(&ones).unwrap() - 1.0).abs() < 1e-14);
        let x = g.points();
        assert!((g.integrate(&x).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_quadratic_error_is_second_order() {
        let g = Grid::uniform(0.0, 1.0, 1001, Boundary::Dirichlet).unwrap();
        let x2 = g.sample(|x| x * x);
        assert!((g.integrate(&x2).unwrap() - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn integrate_rejects_wrong_length() {
        let g = Grid::uniform(0.0, 1.0, 16, Boundary::Dirichlet).unwrap();
        assert_eq!(
            g.integrate(&[1.0; 3]),
            Err(Error::LengthMismatch {
                expected: 16,
                found: 3
            })
        );
    }

    #[test]
    fn derivative_exact_on_low_order_polynomials() {
        let g = Grid::uniform(-0.3, 1.7, 41, Boundary::Dirichlet).unwrap();
        let d1 = g.derivative_matrix(1).unwrap();
        let d2 = g.derivative_matrix(2).unwrap();
        let x = g.points();
        let x2: Vec<f64> = x.iter().map(|v| v * v).collect();
        let dx = apply_real(&d1, &x);
        let ddx2 = apply_real(&d2, &x2);
        // Nodes whose stencil does not touch a pinned endpoint.
        for i in 2..g.n() - 2 {
            assert!((dx[i] - 1.0).abs() < 1e-12, "d1 at {i}: {}", dx[i]);
            assert!((ddx2[i] - 2.0).abs() < 1e-9, "d2 at {i}: {}", ddx2[i]);
        }
        assert_eq!(dx[0], 0.0);
        assert_eq!(dx[g.n() - 1], 0.0);
    }

    #[test]
    fn periodic_first_derivative_of_sine() {
        let g = Grid::uniform(0.0, 1.0, 256, Boundary::Periodic).unwrap();
        let d1 = g.derivative_matrix(1).unwrap();
        let f = g.sample(|x| (2.0 * PI * x).sin());
        let df = apply_real(&d1, &f);
        let err = g
            .points()
            .iter()
            .zip(&df)
            .map(|(x, d)| (d - 2.0 * PI * (2.0 * PI * x).cos()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3, "max error {err}");
    }

    #[test]
    fn unsupported_order() {
        let g = Grid::uniform(0.0, 1.0, 16, Boundary::Periodic).unwrap();
        assert!(matches!(
            g.derivative_matrix(3),
            Err(Error::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn refinement_reduces_error_fourfold() {
        let err = |n: usize| {
            let g = Grid::uniform(0.0, 1.0, n, Boundary::Periodic).unwrap();
            let d1 = g.derivative_matrix(1).unwrap();
            let df = apply_real(&d1, &g.sample(|x| (2.0 * PI * x).sin()));
            g.points()
                .iter()
                .zip(&df)
                .map(|(x, d)| (d - 2.0 * PI * (2.0 * PI * x).cos()).abs())
                .fold(0.0, f64::max)
        };
        for n in [32, 64, 128] {
            let ratio = err(n) / err(2 * n);
            assert!(ratio >= 3.5, "n={n}: ratio {ratio}");
        }
    }

    #[test]
    fn pinned_nodes_and_active_range() {
        let d = Grid::uniform(0.0, 1.0, 10, Boundary::Dirichlet).unwrap();
        assert!(d.is_pinned(0) && d.is_pinned(9) && !d.is_pinned(5));
        assert_eq!(d.active_range(), 1..9);
        let p = Grid::uniform(0.0, 1.0, 10, Boundary::Periodic).unwrap();
        assert!(!p.is_pinned(0));
        assert_eq!(p.active_len(), 10);
    }
}
