//! Ground-state energy and radius of hydrogen-like ions from the uncertainty
//! relation, checked against a radial eigensolve, and the zero-dispersion
//! failure of the uncertainty inequality itself.

use crate::classical::UncertaintyReport;
use crate::dynamics::{build_hamiltonian, kinetic_operator, PhysicalConstants};
use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid};
use crate::quantum::{
    expectation, momentum_operator, position_operator, quantum_uncertainty_check,
    HermitianOperator, WaveFunction,
};
use crate::spectral::diagonalize;

/// CODATA 2018 reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// CODATA 2018 electron mass, kg.
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE_SI: f64 = 1.602_176_634e-19;
/// Coulomb constant `1/(4πε₀)`, N·m²/C².
pub const COULOMB_CONSTANT_SI: f64 = 8.987_551_792_3e9;

const MAX_RADIAL_POINTS: usize = 2048;
const MIN_BOX_RADII: f64 = 20.0;
/// Largest relative energy shift tolerated when the box is doubled.
const BOX_CONVERGENCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParameters {
    z: u32,
    constants: PhysicalConstants,
    coulomb_strength: f64,
    uncertainty_constant: f64,
}

impl AtomParameters {
    /// `z ∈ {1, 2, 3}`; `coulomb_strength` is `e²` in the chosen units.
    pub fn new(z: u32, constants: PhysicalConstants, coulomb_strength: f64) -> Result<Self> {
        if !(1..=3).contains(&z) {
            return Err(Error::Domain(format!("nuclear charge {z} is not in 1..=3")));
        }
        if !(coulomb_strength > 0.0 && coulomb_strength.is_finite()) {
            return Err(Error::Domain(format!(
                "coulomb strength must be positive, got {coulomb_strength}"
            )));
        }
        Ok(Self {
            z,
            constants,
            coulomb_strength,
            uncertainty_constant: 1.0,
        })
    }

    /// `ħ = m = e² = 1`.
    pub fn atomic(z: u32) -> Result<Self> {
        Self::new(z, PhysicalConstants::atomic(), 1.0)
    }

    /// SI units; energies come out in joules and lengths in metres.
    pub fn si(z: u32) -> Result<Self> {
        Self::new(
            z,
            PhysicalConstants::new(HBAR_SI, ELECTRON_MASS_SI)?,
            ELEMENTARY_CHARGE_SI * ELEMENTARY_CHARGE_SI * COULOMB_CONSTANT_SI,
        )
    }

    /// Sets `κ` in the momentum scale `p ~ κħ/r`.
    pub fn with_uncertainty_constant(mut self, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Domain(format!(
                "uncertainty constant must be positive, got {kappa}"
            )));
        }
        self.uncertainty_constant = kappa;
        Ok(self)
    }

    pub fn z(&self) -> u32 {
        self.z
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    pub fn coulomb_strength(&self) -> f64 {
        self.coulomb_strength
    }

    pub fn uncertainty_constant(&self) -> f64 {
        self.uncertainty_constant
    }

    fn charge_strength(&self) -> f64 {
        self.z as f64 * self.coulomb_strength
    }

    /// `κ²ħ²/m`.
    fn kinetic_scale(&self) -> f64 {
        let kh = self.uncertainty_constant * self.constants.hbar();
        kh * kh / self.constants.mass()
    }

    /// `E(r) = κ²ħ²/(2mr²) − Ze²/r`.
    pub fn estimate_energy_at(&self, r: f64) -> f64 {
        0.5 * self.kinetic_scale() / (r * r) - self.charge_strength() / r
    }

    fn estimate_slope_at(&self, r: f64) -> f64 {
        -self.kinetic_scale() / (r * r * r) + self.charge_strength() / (r * r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateEstimate {
    pub energy: f64,
    pub radius: f64,
    /// Minimizer found by bisection on `dE/dr`.
    pub numerical_radius: f64,
    pub numerical_energy: f64,
}

/// Minimizes `E(r)` in closed form and by bisection.
pub fn uncertainty_ground_state_estimate(p: &AtomParameters) -> Result<GroundStateEstimate> {
    let radius = p.kinetic_scale() / p.charge_strength();
    let energy = -0.5 * p.charge_strength() * p.charge_strength() / p.kinetic_scale();
    let numerical_radius = minimize_estimate(p)?;
    Ok(GroundStateEstimate {
        energy,
        radius,
        numerical_radius,
        numerical_energy: p.estimate_energy_at(numerical_radius),
    })
}

/// Brackets the sign change of `dE/dr` from `r = 1` outwards, then bisects
/// in `ln r`.
fn minimize_estimate(p: &AtomParameters) -> Result<f64> {
    let mut lo = 1.0f64;
    let mut hi = 1.0f64;
    for _ in 0..400 {
        if p.estimate_slope_at(lo) < 0.0 && p.estimate_slope_at(hi) > 0.0 {
            break;
        }
        if p.estimate_slope_at(lo) >= 0.0 {
            lo *= 0.5;
        }
        if p.estimate_slope_at(hi) <= 0.0 {
            hi *= 2.0;
        }
    }
    if !(p.estimate_slope_at(lo) < 0.0 && p.estimate_slope_at(hi) > 0.0) {
        return Err(Error::Convergence("could not bracket the energy minimum".into()));
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if p.estimate_slope_at(mid.exp()) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

#[derive(Debug, Clone)]
pub struct RadialGroundState {
    pub energy: f64,
    /// `u(r) = r R(r)` on `[0, r_max]`.
    pub wavefunction: WaveFunction,
    pub mean_radius: f64,
    pub kinetic_energy: f64,
    pub potential_energy: f64,
    /// Relative energy change between boxes `r_max` and `2 r_max` at equal
    /// spacing.
    pub box_shift: f64,
}

/// Lowest `l = 0` level of `−(ħ²/2m)u″ − (Ze²/r)u = Eu` with `u(0) = u(r_max) = 0`.
pub fn radial_ground_state(p: &AtomParameters, r_max: f64, n: usize) -> Result<RadialGroundState> {
    let estimate = uncertainty_ground_state_estimate(p)?;
    if !(r_max >= MIN_BOX_RADII * estimate.radius) {
        return Err(Error::Domain(format!(
            "r_max = {r_max} is below {MIN_BOX_RADII} estimated radii ({})",
            estimate.radius
        )));
    }
    if n > MAX_RADIAL_POINTS {
        return Err(Error::Domain(format!(
            "n = {n} exceeds {MAX_RADIAL_POINTS} radial points"
        )));
    }

    let half = n / 2 + 1;
    let coarse = radial_energy(p, r_max, half)?;
    let doubled = radial_energy(p, 2.0 * r_max, 2 * half - 1)?;
    let box_shift = ((doubled - coarse) / doubled).abs();
    if box_shift > BOX_CONVERGENCE {
        return Err(Error::BoxTooSmall {
            relative_shift: box_shift,
        });
    }

    let (grid, potential) = radial_setup(p, r_max, n)?;
    let h = build_hamiltonian(&grid, &potential, p.constants)?;
    let dec = diagonalize(&h)?;
    let energy = dec.eigenvalue(0)?;
    let wavefunction = dec.eigenvector(0)?;
    let mean_radius = expectation(&wavefunction, &position_operator(&grid))?;
    let kinetic_energy = expectation(&wavefunction, &kinetic_operator(&grid, p.constants))?;
    let potential_energy =
        expectation(&wavefunction, &HermitianOperator::diagonal(grid.clone(), &potential)?)?;
    Ok(RadialGroundState {
        energy,
        wavefunction,
        mean_radius,
        kinetic_energy,
        potential_energy,
        box_shift,
    })
}

fn radial_setup(p: &AtomParameters, r_max: f64, n: usize) -> Result<(Grid, Vec<f64>)> {
    let grid = Grid::uniform(0.0, r_max, n, Boundary::Dirichlet)?;
    let strength = p.charge_strength();
    let potential = grid.sample(|r| if r > 0.0 { -strength / r } else { 0.0 });
    Ok((grid, potential))
}

fn radial_energy(p: &AtomParameters, r_max: f64, n: usize) -> Result<f64> {
    let (grid, potential) = radial_setup(p, r_max, n)?;
    diagonalize(&build_hamiltonian(&grid, &potential, p.constants)?)?.eigenvalue(0)
}

#[derive(Debug, Clone)]
pub struct FailureDemo {
    pub state: WaveFunction,
    pub report: UncertaintyReport,
}

/// Runs the uncertainty check of `Â` against `p̂` in a given state.
pub fn failure_condition_in_state(
    psi: &WaveFunction,
    a_op: &HermitianOperator,
    epsilon: f64,
    hbar: f64,
) -> Result<FailureDemo> {
    let report = quantum_uncertainty_check(psi, a_op, &momentum_operator(psi.grid(), hbar), epsilon)?;
    Ok(FailureDemo {
        state: psi.clone(),
        report,
    })
}

/// Runs the uncertainty check in eigenvector `index` of `Â`, where the
/// dispersion of `Â` vanishes and the inequality is not derivable.
pub fn failure_condition_demo(
    a_op: &HermitianOperator,
    index: usize,
    epsilon: f64,
    hbar: f64,
) -> Result<FailureDemo> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let psi = diagonalize(a_op)?.eigenvector(index)?;
    failure_condition_in_state(&psi, a_op, epsilon, hbar)
}
