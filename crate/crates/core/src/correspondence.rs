//! Bridges between quantum averages and classical mixture averages.
//!
//! Expanding `Ψ = Σ c_i φ_i` splits `⟨Ψ|f̂|Ψ⟩` into the diagonal part
//! `Σ |c_i|² ⟨φ_i|f̂|φ_i⟩`, which has the form of a classical mixture with
//! weights `a_i = |c_i|²`, and the cross terms `c_i* c_j ⟨φ_i|f̂|φ_j⟩`. The
//! quantum average reduces to the classical one exactly when the cross terms
//! vanish.

use faer::Mat;
use num_complex::Complex64;

use crate::classical::{classical_average, ClassicalObservable, ProbabilityDensity};
use crate::dynamics::{build_hamiltonian, PhysicalConstants};
use crate::error::{check_len, Error, Result};
use crate::grid::Grid;
use crate::quantum::{expectation, mean_and_variance, position_operator, HermitianOperator, WaveFunction};
use crate::spectral::{diagonalize, SpectralDecomposition};

/// Tolerance on `Σ a_i = 1` and on agreement between the two mixture-average
/// routes.
const MIXTURE_TOLERANCE: f64 = 1e-9;

/// Tolerance on `Σ |c_i|² = 1`.
const COEFFICIENT_TOLERANCE: f64 = 1e-8;

/// Weighted collection of classical densities, each carrying one value `f_i`.
#[derive(Debug, Clone)]
pub struct MixtureEnsemble {
    weights: Vec<f64>,
    densities: Vec<ProbabilityDensity>,
    values: Vec<f64>,
}

impl MixtureEnsemble {
    pub fn new(
        weights: Vec<f64>,
        densities: Vec<ProbabilityDensity>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_len(weights.len(), densities.len())?;
        check_len(weights.len(), values.len())?;
        if weights.is_empty() {
            return Err(Error::InvalidMixture("ensemble is empty".into()));
        }
        if weights.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidMixture("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MIXTURE_TOLERANCE {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        let grid = densities[0].grid();
        if densities.iter().any(|d| d.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            weights,
            densities,
            values,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn densities(&self) -> &[ProbabilityDensity] {
        &self.densities
    }

    /// `∫ Σ a_i ρ_i f_i dY` evaluated by quadrature.
    pub fn quadrature_average(&self) -> Result<f64> {
        let grid = self.densities[0].grid();
        let mut integrand = vec![0.0; grid.n()];
        for ((a, rho), f) in self.weights.iter().zip(&self.densities).zip(&self.values) {
            integrand
                .iter_mut()
                .zip(rho.values())
                .for_each(|(acc, r)| *acc += a * r * f);
        }
        grid.integrate(&integrand)
    }
}

/// `Σ a_i f_i`, cross-checked against the quadrature form.
pub fn mixture_average(e: &MixtureEnsemble) -> Result<f64> {
    let direct: f64 = e.weights.iter().zip(&e.values).map(|(a, f)| a * f).sum();
    let quadrature = e.quadrature_average()?;
    if (direct - quadrature).abs() > MIXTURE_TOLERANCE * direct.abs().max(1.0) {
        return Err(Error::InvalidMixture(format!(
            "sum {direct} disagrees with quadrature {quadrature}"
        )));
    }
    Ok(direct)
}

/// `a_i = |c_i|²`.
pub fn coefficients_to_weights(c: &[Complex64]) -> Result<Vec<f64>> {
    let weights: Vec<f64> = c.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > COEFFICIENT_TOLERANCE {
        return Err(Error::NotNormalized(total));
    }
    Ok(weights)
}

#[derive(Debug, Clone)]
pub struct CrossTermReport {
    /// `⟨φ_i|f̂|φ_i⟩`.
    pub diagonal: Vec<f64>,
    /// `⟨φ_i|f̂|φ_j⟩` with the diagonal set to zero.
    pub off_diagonal: Mat<Complex64>,
    pub max_off_diagonal: f64,
    /// `Σ_ij c_i* c_j ⟨φ_i|f̂|φ_j⟩`.
    pub quantum_average: f64,
    /// `Σ_i |c_i|² ⟨φ_i|f̂|φ_i⟩`.
    pub classical_average: f64,
    /// `Σ_{i≠j} c_i* c_j ⟨φ_i|f̂|φ_j⟩`.
    pub cross_contribution: f64,
    /// `⟨Ψ|f̂|Ψ⟩` for `Ψ = Σ c_i φ_i`, evaluated directly on the grid.
    pub direct_average: f64,
}

/// Splits the average of `f̂` in `Ψ = Σ c_i φ_i` into diagonal and cross
/// terms. `c` may be shorter than the basis; it addresses the lowest
/// `c.len()` eigenvectors.
pub fn cross_term_report(
    c: &[Complex64],
    dec: &SpectralDecomposition,
    op: &HermitianOperator,
) -> Result<CrossTermReport> {
    if op.grid() != dec.grid() {
        return Err(Error::GridMismatch);
    }
    let k = c.len();
    if k == 0 || k > dec.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: dec.len(),
        });
    }
    coefficients_to_weights(c)?;
    let grid = dec.grid();
    let basis: Vec<WaveFunction> = (0..k).map(|j| dec.eigenvector(j)).collect::<Result<_>>()?;
    let images: Vec<Vec<Complex64>> = basis
        .iter()
        .map(|phi| op.apply(phi.values()))
        .collect::<Result<_>>()?;

    let mut elements = Mat::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            elements[(i, j)] = grid.inner_product(basis[i].values(), &images[j])?;
        }
    }

    let diagonal: Vec<f64> = (0..k).map(|i| elements[(i, i)].re).collect();
    let mut off_diagonal = elements.clone();
    let mut max_off_diagonal = 0.0f64;
    let mut cross = Complex64::new(0.0, 0.0);
    let mut classical = 0.0;
    for i in 0..k {
        classical += c[i].norm_sqr() * diagonal[i];
        for j in 0..k {
            if i == j {
                off_diagonal[(i, j)] = Complex64::new(0.0, 0.0);
            } else {
                max_off_diagonal = max_off_diagonal.max(elements[(i, j)].norm());
                cross += c[i].conj() * c[j] * elements[(i, j)];
            }
        }
    }
    let mut quantum = Complex64::new(0.0, 0.0);
    for i in 0..k {
        for j in 0..k {
            quantum += c[i].conj() * c[j] * elements[(i, j)];
        }
    }

    let mut psi = vec![Complex64::new(0.0, 0.0); grid.n()];
    for (phi, ci) in basis.iter().zip(c) {
        psi.iter_mut().zip(phi.values()).for_each(|(p, v)| *p += ci * v);
    }
    let psi = WaveFunction::new(grid.clone(), psi)?;
    let direct_average = expectation(&psi, op)?;

    Ok(CrossTermReport {
        diagonal,
        off_diagonal,
        max_off_diagonal,
        quantum_average: quantum.re,
        classical_average: classical,
        cross_contribution: cross.re,
        direct_average,
    })
}

/// Pointwise product `φ_i*(x) φ_j(x)`.
#[derive(Debug, Clone)]
pub struct DecoherenceFactor {
    pub values: Vec<Complex64>,
    /// `∫ φ_i* φ_j dY`.
    pub integral: Complex64,
    /// `max_x |φ_i*(x) φ_j(x)|`.
    pub sup_norm: f64,
}

/// Decoherence factor of two arbitrary states on a shared grid.
pub fn decoherence_factor_between(
    phi_i: &WaveFunction,
    phi_j: &WaveFunction,
) -> Result<DecoherenceFactor> {
    if phi_i.grid() != phi_j.grid() {
        return Err(Error::GridMismatch);
    }
    let values: Vec<Complex64> = phi_i
        .values()
        .iter()
        .zip(phi_j.values())
        .map(|(a, b)| a.conj() * b)
        .collect();
    let integral = phi_i.grid().integrate(&values)?;
    let sup_norm = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(DecoherenceFactor {
        values,
        integral,
        sup_norm,
    })
}

/// Decoherence factor of eigenvectors `i ≠ j` of a decomposition.
pub fn decoherence_factor(
    dec: &SpectralDecomposition,
    i: usize,
    j: usize,
) -> Result<DecoherenceFactor> {
    if i == j {
        return Err(Error::Domain(
            "a diagonal pair is a density, not a decoherence factor".into(),
        ));
    }
    decoherence_factor_between(&dec.eigenvector(i)?, &dec.eigenvector(j)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalLimitProbe {
    pub widths: Vec<f64>,
    /// `|⟨f⟩_w − f(x0)|` per width.
    pub gaps: Vec<f64>,
    /// Range of `f` over the grid.
    pub range: f64,
}

impl ClassicalLimitProbe {
    /// Each gap is at most `(1 + slack)` times its predecessor. Gaps below
    /// `1e-12 · range(f)` count as rounding noise.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        let floor = 1e-12 * self.range.max(f64::MIN_POSITIVE);
        self.gaps.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack) + floor)
    }

    /// Narrowest gap below `1e-3 · range(f)`.
    pub fn reaches_point_value(&self) -> bool {
        self.gaps.last().is_some_and(|g| *g < 1e-3 * self.range)
    }
}

/// Linear interpolation of grid samples; exact at nodes.
fn interpolate(f: &ClassicalObservable, x: f64) -> f64 {
    let grid = f.grid();
    let values = f.values();
    let t = (x - grid.x_min()) / grid.spacing();
    let i = (t.floor() as usize).min(grid.n() - 1);
    if i + 1 >= grid.n() {
        return values[grid.n() - 1];
    }
    let frac = t - i as f64;
    if frac == 0.0 {
        values[i]
    } else {
        values[i] * (1.0 - frac) + values[i + 1] * frac
    }
}

/// Averages `f` over narrowing Gaussian densities centred at `x0` and
/// reports the distance to the point value `f(x0)`.
pub fn classical_limit_probe(
    f: &ClassicalObservable,
    x0: f64,
    widths: &[f64],
) -> Result<ClassicalLimitProbe> {
    let grid = f.grid();
    if !grid.contains(x0) {
        return Err(Error::Domain(format!("x0 = {x0} is outside the grid")));
    }
    let f_at_x0 = interpolate(f, x0);
    if widths.is_empty() || widths.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Domain("widths must be positive".into()));
    }
    if widths.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("widths must be strictly descending".into()));
    }
    let gaps = widths
        .iter()
        .map(|&w| {
            let rho = ProbabilityDensity::gaussian(grid.clone(), x0, w)?;
            Ok((classical_average(&rho, f)? - f_at_x0).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassicalLimitProbe {
        widths: widths.to_vec(),
        gaps,
        range: f.range(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbarScanPoint {
    pub hbar: f64,
    pub ground_energy: f64,
    pub first_excited_energy: f64,
    /// `(f_1 − f_0) / f_0`.
    pub gap_ratio: f64,
    /// `⟨Δx²⟩` in the ground state.
    pub position_variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HbarScan {
    pub points: Vec<HbarScanPoint>,
}

impl HbarScan {
    /// Ground-state localization tightens as ħ shrinks.
    pub fn variance_strictly_decreasing(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].position_variance < w[0].position_variance)
    }
}

/// Solves the two lowest levels of `V` for each ħ in a descending sequence.
pub fn hbar_scaling_scan(
    potential: &[f64],
    grid: &Grid,
    hbar_values: &[f64],
    mass: f64,
) -> Result<HbarScan> {
    check_len(grid.n(), potential.len())?;
    if hbar_values.is_empty() || hbar_values.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::Domain("hbar values must be positive".into()));
    }
    if hbar_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("hbar values must be strictly descending".into()));
    }
    let x = position_operator(grid);
    let points = hbar_values
        .iter()
        .map(|&hbar| {
            let h = build_hamiltonian(grid, potential, PhysicalConstants::new(hbar, mass)?)?;
            let dec = diagonalize(&h)?;
            let e0 = dec.eigenvalue(0)?;
            let e1 = dec.eigenvalue(1)?;
            let (_, position_variance) = mean_and_variance(&dec.eigenvector(0)?, &x)?;
            Ok(HbarScanPoint {
                hbar,
                ground_energy: e0,
                first_excited_energy: e1,
                gap_ratio: (e1 - e0) / e0,
                position_variance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HbarScan { points })
}
