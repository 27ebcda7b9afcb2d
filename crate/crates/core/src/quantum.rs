//! Wavefunctions, Hermitian operators, expectation values and the quantum
//! uncertainty principle.
//!
//! With `Ĉ = −i[Â, B̂]` the average of `|ΔÂζ − iΔB̂|²` expands to
//! `F(ζ) = ⟨ΔÂ²⟩ζ² + C̄ζ + ⟨ΔB̂²⟩ ≥ 0` for every real `ζ`, which yields
//! `⟨ΔÂ²⟩⟨ΔB̂²⟩ ≥ C̄²/4` whenever `⟨ΔÂ²⟩ > 0`.

use faer::{Col, Mat, MatRef};
use num_complex::Complex64;

use crate::classical::{ProbabilityDensity, UncertaintyReport};
use crate::error::{check_len, Error, Result};
use crate::grid::Grid;

/// Relative tolerance of the Hermiticity test applied at construction.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Largest imaginary part (relative to `max(1, |re|)`) tolerated in an
/// expectation value.
pub const REALITY_TOLERANCE: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Complex state normalized to `∫|Ψ|² = 1`.
///
/// On Dirichlet grids the two endpoint samples are forced to zero before
/// normalizing.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, mut values: Vec<Complex64>) -> Result<Self> {
        check_len(grid.n(), values.len())?;
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain("wavefunction samples must be finite".into()));
        }
        for i in [0, grid.n() - 1] {
            if grid.is_pinned(i) {
                values[i] = Complex64::new(0.0, 0.0);
            }
        }
        let norm = grid.norm(&values)?;
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        values.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.sample(f);
        Self::new(grid, values)
    }

    /// Wraps samples that are already normalized without rescaling them.
    pub(crate) fn from_normalized(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.n(), values.len());
        Self { grid, values }
    }

    /// Quadrature norm of the stored samples (1 up to round-off).
    pub fn norm(&self) -> f64 {
        self.grid.norm(&self.values).expect("length matches grid")
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Minimum-uncertainty packet `exp(−(x−x0)²/4σ² + i k0 x)`, so that
    /// `⟨Δx²⟩ = σ²`.
    pub fn gaussian(grid: Grid, center: f64, sigma: f64, k0: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
        }
        Self::from_fn(grid, |x| {
            let z = (x - center) / sigma;
            Complex64::from_polar((-0.25 * z * z).exp(), k0 * x)
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `e^{iθ} Ψ`.
    pub fn with_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| phase * z).collect(),
        }
    }

    /// `⟨self, other⟩` under the grid quadrature.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        same_grid(&self.grid, &other.grid)?;
        self.grid.inner_product(&self.values, &other.values)
    }

    /// Quadrature norm of `self − other`.
    pub fn distance(&self, other: &WaveFunction) -> Result<f64> {
        same_grid(&self.grid, &other.grid)?;
        let diff: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        self.grid.norm(&diff)
    }
}

impl AsRef<[Complex64]> for WaveFunction {
    fn as_ref(&self) -> &[Complex64] {
        &self.values
    }
}

/// Dense self-adjoint matrix acting on grid samples.
///
/// Rows and columns of pinned Dirichlet nodes are zeroed at construction, and
/// the matrix is replaced by its exact Hermitian part.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    grid: Grid,
    matrix: Mat<Complex64>,
}

impl HermitianOperator {
    pub fn new(grid: Grid, matrix: Mat<Complex64>) -> Result<Self> {
        let n = grid.n();
        check_len(n, matrix.nrows())?;
        check_len(n, matrix.ncols())?;
        let mut scale = 0.0f64;
        let mut deviation = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let a = matrix[(i, j)];
                if !(a.re.is_finite() && a.im.is_finite()) {
                    return Err(Error::Domain("operator entries must be finite".into()));
                }
                scale = scale.max(a.norm());
                deviation = deviation.max((a - matrix[(j, i)].conj()).norm());
            }
        }
        let tolerance = HERMITICITY_TOLERANCE * scale;
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        let matrix = Mat::from_fn(n, n, |i, j| {
            if grid.is_pinned(i) || grid.is_pinned(j) {
                Complex64::new(0.0, 0.0)
            } else {
                0.5 * (matrix[(i, j)] + matrix[(j, i)].conj())
            }
        });
        Ok(Self { grid, matrix })
    }

    pub fn from_real(grid: Grid, matrix: &Mat<f64>) -> Result<Self> {
        let m = Mat::from_fn(matrix.nrows(), matrix.ncols(), |i, j| {
            Complex64::new(matrix[(i, j)], 0.0)
        });
        Self::new(grid, m)
    }

    pub fn diagonal(grid: Grid, diag: &[f64]) -> Result<Self> {
        check_len(grid.n(), diag.len())?;
        let n = grid.n();
        let m = Mat::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { diag[i] } else { 0.0 }, 0.0)
        });
        Self::new(grid, m)
    }

    pub fn identity(grid: Grid) -> Self {
        let ones = vec![1.0; grid.n()];
        Self::diagonal(grid, &ones).expect("identity is Hermitian")
    }

    pub fn zero(grid: Grid) -> Self {
        let n = grid.n();
        Self {
            grid,
            matrix: Mat::zeros(n, n),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.matrix.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.grid.n()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max(self.matrix[(i, j)].norm());
            }
        }
        m
    }

    pub fn is_real(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| self.matrix[(i, j)].im == 0.0))
    }

    /// `f̂ v` for raw samples `v`.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.dim(), v.len())?;
        let col = Col::from_fn(v.len(), |i| v[i]);
        let out = &self.matrix * &col;
        Ok((0..out.nrows()).map(|i| out[i]).collect())
    }

    /// `f̂ − c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut matrix = self.matrix.clone();
        for i in self.grid.active_range() {
            matrix[(i, i)] -= c;
        }
        Self {
            grid: self.grid.clone(),
            matrix,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let n = self.dim();
        Self {
            grid: self.grid.clone(),
            matrix: Mat::from_fn(n, n, |i, j| self.matrix[(i, j)] * c),
        }
    }

    /// `f̂ + ĝ`.
    pub fn sum(&self, other: &HermitianOperator) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }
}

fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

fn real_part_checked(z: Complex64) -> Result<f64> {
    let tolerance = REALITY_TOLERANCE * z.re.abs().max(1.0);
    if z.im.abs() > tolerance {
        return Err(Error::HermiticityViolation {
            imaginary: z.im,
            tolerance,
        });
    }
    Ok(z.re)
}

/// `|Ψ|²` as a classical density.
pub fn density_from_wavefunction(psi: &WaveFunction) -> ProbabilityDensity {
    let values = psi.values.iter().map(|z| z.norm_sqr()).collect();
    ProbabilityDensity::new(psi.grid.clone(), values)
        .expect("normalized wavefunction yields a valid density")
}

/// `∫ Ψ* f̂ Ψ dY`.
pub fn expectation(psi: &WaveFunction, op: &HermitianOperator) -> Result<f64> {
    same_grid(&psi.grid, &op.grid)?;
    let fpsi = op.apply(&psi.values)?;
    real_part_checked(psi.grid.inner_product(&psi.values, &fpsi)?)
}

/// Multiplication by `x`.
pub fn position_operator(grid: &Grid) -> HermitianOperator {
    HermitianOperator::diagonal(grid.clone(), &grid.points()).expect("diagonal is Hermitian")
}

/// `−iħ d/dx` built from the central-difference matrix.
pub fn momentum_operator(grid: &Grid, hbar: f64) -> HermitianOperator {
    let d1 = grid.derivative_matrix(1).expect("order 1 is supported");
    let n = grid.n();
    let m = Mat::from_fn(n, n, |i, j| Complex64::new(0.0, -hbar * d1[(i, j)]));
    HermitianOperator::new(grid.clone(), m).expect("antisymmetric difference times -i is Hermitian")
}

/// `Ĉ = −i(ÂB̂ − B̂Â)`, so that `[Â, B̂] = iĈ`.
pub fn commutator_c(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    same_grid(&a.grid, &b.grid)?;
    let ab = &a.matrix * &b.matrix;
    let ba = &b.matrix * &a.matrix;
    let n = a.dim();
    let c = Mat::from_fn(n, n, |i, j| -I * (ab[(i, j)] - ba[(i, j)]));
    HermitianOperator::new(a.grid.clone(), c)
}

/// Second moments of a pair of operators in one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumMoments {
    pub mean_a: f64,
    pub mean_b: f64,
    pub variance_a: f64,
    pub variance_b: f64,
    /// `⟨Ĉ⟩` with `Ĉ = −i[Â, B̂]`.
    pub commutator_mean: f64,
}

impl QuantumMoments {
    /// `F(ζ) = ⟨ΔÂ²⟩ζ² + C̄ζ + ⟨ΔB̂²⟩`.
    pub fn quadratic_form(&self, zeta: f64) -> f64 {
        self.variance_a * zeta * zeta + self.commutator_mean * zeta + self.variance_b
    }
}

/// Mean and `‖(f̂ − f̄)Ψ‖²`.
pub fn mean_and_variance(psi: &WaveFunction, op: &HermitianOperator) -> Result<(f64, f64)> {
    let (mean, delta) = fluctuation(psi, op)?;
    Ok((mean, psi.grid.norm(&delta)?.powi(2)))
}

fn fluctuation(psi: &WaveFunction, op: &HermitianOperator) -> Result<(f64, Vec<Complex64>)> {
    same_grid(&psi.grid, &op.grid)?;
    let fpsi = op.apply(&psi.values)?;
    let mean = real_part_checked(psi.grid.inner_product(&psi.values, &fpsi)?)?;
    let delta = fpsi
        .iter()
        .zip(&psi.values)
        .map(|(f, p)| f - mean * p)
        .collect();
    Ok((mean, delta))
}

pub fn quantum_moments(
    psi: &WaveFunction,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<QuantumMoments> {
    let (mean_a, variance_a) = mean_and_variance(psi, a)?;
    let (mean_b, variance_b) = mean_and_variance(psi, b)?;
    let commutator_mean = expectation(psi, &commutator_c(a, b)?)?;
    Ok(QuantumMoments {
        mean_a,
        mean_b,
        variance_a,
        variance_b,
        commutator_mean,
    })
}

/// `F(ζ)` from the moments.
pub fn quantum_quadratic_form(
    psi: &WaveFunction,
    a: &HermitianOperator,
    b: &HermitianOperator,
    zeta: f64,
) -> Result<f64> {
    Ok(quantum_moments(psi, a, b)?.quadratic_form(zeta))
}

/// `F(ζ)` as the direct average `‖(ΔÂζ − iΔB̂)Ψ‖²`.
pub fn quantum_quadratic_form_direct(
    psi: &WaveFunction,
    a: &HermitianOperator,
    b: &HermitianOperator,
    zeta: f64,
) -> Result<f64> {
    let (_, da) = fluctuation(psi, a)?;
    let (_, db) = fluctuation(psi, b)?;
    let combined: Vec<Complex64> = da.iter().zip(&db).map(|(x, y)| zeta * x - I * y).collect();
    Ok(psi.grid.norm(&combined)?.powi(2))
}

/// Checks `⟨ΔÂ²⟩⟨ΔB̂²⟩ ≥ C̄²/4` together with its non-degeneracy conditions.
pub fn quantum_uncertainty_check(
    psi: &WaveFunction,
    a: &HermitianOperator,
    b: &HermitianOperator,
    epsilon: f64,
) -> Result<UncertaintyReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    Ok(report_from_moments(&quantum_moments(psi, a, b)?, epsilon))
}

pub fn report_from_moments(m: &QuantumMoments, epsilon: f64) -> UncertaintyReport {
    let c = m.commutator_mean;
    UncertaintyReport::assemble(m.variance_a, m.variance_b, 0.25 * c * c, epsilon, || {
        m.quadratic_form(-c / (2.0 * m.variance_a))
    })
}
