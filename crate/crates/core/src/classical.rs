//! Classical statistical averages and the classical uncertain relation.
//!
//! For a density `ρ` and real observables `A`, `B` the quadratic
//! `G(ξ) = ⟨ΔA²⟩ξ² + 2⟨ΔAΔB⟩ξ + ⟨ΔB²⟩` is the average of the square
//! `(ΔA ξ + ΔB)²` and therefore non-negative. Its discriminant gives
//! `⟨ΔA²⟩⟨ΔB²⟩ ≥ ⟨ΔAΔB⟩²`, but only once `⟨ΔA²⟩` is strictly positive;
//! [`UncertaintyReport::applicable`] records whether that holds.

use crate::error::{check_len, Error, Result};
use crate::grid::Grid;

/// Relative slack allowed when comparing the two sides of an uncertainty
/// inequality.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Non-negative density normalized to unit mass on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDensity {
    grid: Grid,
    values: Vec<f64>,
}

impl ProbabilityDensity {
    /// Builds a density from non-negative samples, rescaling them to unit mass.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(grid.n(), values.len())?;
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDensity(format!(
                "density values must be finite and non-negative, found {bad}"
            )));
        }
        let mass = grid.integrate(&values)?;
        if mass <= 0.0 || !mass.is_finite() {
            return Err(Error::InvalidDensity(format!("total mass is {mass}")));
        }
        let values = values.into_iter().map(|v| v / mass).collect();
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.sample(f);
        Self::new(grid, values)
    }

    pub fn uniform(grid: Grid) -> Self {
        let values = vec![1.0 / grid.extent(); grid.n()];
        Self::new(grid, values).expect("uniform density is valid")
    }

    /// Gaussian of standard deviation `width` centred at `center`, truncated
    /// to the grid and renormalized.
    pub fn gaussian(grid: Grid, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Domain(format!("width must be positive, got {width}")));
        }
        Self::from_fn(grid, |x| {
            let z = (x - center) / width;
            (-0.5 * z * z).exp()
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Real-valued function of configuration sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalObservable {
    grid: Grid,
    values: Vec<f64>,
}

impl ClassicalObservable {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(grid.n(), values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("observable values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.sample(f);
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Multiplies every sample by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Largest minus smallest sample.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }
}

/// Outcome of an uncertainty-relation check, classical or quantum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub variance_a: f64,
    pub variance_b: f64,
    /// `⟨ΔAΔB⟩²` (classical) or `C̄²/4` (quantum).
    pub cross_term: f64,
    /// `variance_a * variance_b`.
    pub lhs: f64,
    /// Raw comparison `lhs ≥ cross_term` with relative slack. Meaningful only
    /// when `applicable` is set.
    pub inequality_holds: bool,
    /// Both variances exceed `epsilon`.
    pub applicable: bool,
    pub epsilon: f64,
    /// Value of the quadratic form at its minimizer (the completed-square
    /// remainder). `None` when not applicable.
    pub completed_square_minimum: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    /// A variance vanished, so the inequality cannot be derived and is not
    /// asserted.
    NotApplicable,
}

impl UncertaintyReport {
    pub(crate) fn assemble(
        variance_a: f64,
        variance_b: f64,
        cross_term: f64,
        epsilon: f64,
        completed_square: impl FnOnce() -> f64,
    ) -> Self {
        let lhs = variance_a * variance_b;
        let applicable = variance_a > epsilon && variance_b > epsilon;
        let inequality_holds = lhs >= cross_term - INEQUALITY_SLACK * lhs.max(1.0);
        Self {
            variance_a,
            variance_b,
            cross_term,
            lhs,
            inequality_holds,
            applicable,
            epsilon,
            completed_square_minimum: applicable.then(completed_square),
        }
    }

    pub fn verdict(&self) -> Verdict {
        if !self.applicable {
            Verdict::NotApplicable
        } else if self.inequality_holds
            && self
                .completed_square_minimum
                .is_some_and(|g| g >= -INEQUALITY_SLACK * self.variance_b.max(1.0))
        {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

/// Default degeneracy threshold `1e-12 · extent²`.
pub fn default_epsilon(grid: &Grid) -> f64 {
    1e-12 * grid.extent() * grid.extent()
}

fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

fn mean_of(rho: &ProbabilityDensity, values: &[f64]) -> Result<f64> {
    let weighted: Vec<f64> = rho.values.iter().zip(values).map(|(p, f)| p * f).collect();
    rho.grid.integrate(&weighted)
}

/// `∫ ρ f dY`.
pub fn classical_average(rho: &ProbabilityDensity, f: &ClassicalObservable) -> Result<f64> {
    same_grid(&rho.grid, &f.grid)?;
    mean_of(rho, &f.values)
}

fn fluctuation(rho: &ProbabilityDensity, a: &ClassicalObservable) -> Result<Vec<f64>> {
    let mean = classical_average(rho, a)?;
    Ok(a.values.iter().map(|v| v - mean).collect())
}

/// `⟨(A − Ā)²⟩`, clamped at zero.
pub fn variance(rho: &ProbabilityDensity, a: &ClassicalObservable) -> Result<f64> {
    let da = fluctuation(rho, a)?;
    let sq: Vec<f64> = da.iter().map(|d| d * d).collect();
    Ok(mean_of(rho, &sq)?.max(0.0))
}

/// `⟨ΔA ΔB⟩`.
pub fn covariance(
    rho: &ProbabilityDensity,
    a: &ClassicalObservable,
    b: &ClassicalObservable,
) -> Result<f64> {
    let da = fluctuation(rho, a)?;
    let db = fluctuation(rho, b)?;
    let prod: Vec<f64> = da.iter().zip(&db).map(|(x, y)| x * y).collect();
    mean_of(rho, &prod)
}

/// `G(ξ)` assembled from the second moments.
pub fn classical_quadratic_form(
    rho: &ProbabilityDensity,
    a: &ClassicalObservable,
    b: &ClassicalObservable,
    xi: f64,
) -> Result<f64> {
    let va = variance(rho, a)?;
    let vb = variance(rho, b)?;
    let cov = covariance(rho, a, b)?;
    Ok(va * xi * xi + 2.0 * cov * xi + vb)
}

/// `G(ξ)` as the direct average of `(ΔA ξ + ΔB)²`.
pub fn classical_quadratic_form_direct(
    rho: &ProbabilityDensity,
    a: &ClassicalObservable,
    b: &ClassicalObservable,
    xi: f64,
) -> Result<f64> {
    let da = fluctuation(rho, a)?;
    let db = fluctuation(rho, b)?;
    let sq: Vec<f64> = da
        .iter()
        .zip(&db)
        .map(|(x, y)| {
            let s = x * xi + y;
            s * s
        })
        .collect();
    mean_of(rho, &sq)
}

/// Checks `⟨ΔA²⟩⟨ΔB²⟩ ≥ ⟨ΔAΔB⟩²` together with its non-degeneracy conditions.
pub fn classical_uncertainty_check(
    rho: &ProbabilityDensity,
    a: &ClassicalObservable,
    b: &ClassicalObservable,
    epsilon: f64,
) -> Result<UncertaintyReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let va = variance(rho, a)?;
    let vb = variance(rho, b)?;
    let cov = covariance(rho, a, b)?;
    Ok(UncertaintyReport::assemble(va, vb, cov * cov, epsilon, || {
        let xi_star = -cov / va;
        va * xi_star * xi_star + 2.0 * cov * xi_star + vb
    }))
}
