//! Hamiltonian assembly, Crank–Nicolson time evolution, superposition and
//! plane-wave eigenchecks.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::grid::{Boundary, Grid};
use crate::quantum::{momentum_operator, HermitianOperator, WaveFunction};

/// Norm deviation beyond which a Crank–Nicolson step is treated as a failed
/// linear solve.
const TRAJECTORY_NORM_TOLERANCE: f64 = 1e-8;

/// Superpositions with a smaller raw norm count as complete cancellation.
const ZERO_NORM_THRESHOLD: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) || !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!(
                "hbar and mass must be positive, got hbar={hbar}, mass={mass}"
            )));
        }
        Ok(Self { hbar, mass })
    }

    /// `ħ = m = 1`.
    pub const fn atomic() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::atomic()
    }
}

/// `Ĥ = −(ħ²/2m) d²/dx² + V(x)`.
pub fn build_hamiltonian(
    grid: &Grid,
    potential: &[f64],
    constants: PhysicalConstants,
) -> Result<HermitianOperator> {
    check_len(grid.n(), potential.len())?;
    let d2 = grid.derivative_matrix(2)?;
    let kinetic = -constants.hbar * constants.hbar / (2.0 * constants.mass);
    let n = grid.n();
    let h = Mat::from_fn(n, n, |i, j| {
        kinetic * d2[(i, j)] + if i == j { potential[i] } else { 0.0 }
    });
    HermitianOperator::from_real(grid.clone(), &h)
}

/// Kinetic term alone, `−(ħ²/2m) d²/dx²`.
pub fn kinetic_operator(grid: &Grid, constants: PhysicalConstants) -> HermitianOperator {
    build_hamiltonian(grid, &vec![0.0; grid.n()], constants).expect("zero potential is valid")
}

/// Sampled states along a time axis.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<WaveFunction>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[WaveFunction] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &WaveFunction {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Largest `|‖Ψ(t)‖ − 1|` along the trajectory.
    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Unwrapped phase of `⟨φ, Ψ(t)⟩` at every stored time.
    pub fn phase_against(&self, phi: &WaveFunction) -> Result<Vec<f64>> {
        let mut phases = Vec::with_capacity(self.len());
        let mut previous = 0.0f64;
        for (k, s) in self.states.iter().enumerate() {
            let arg = phi.inner(s)?.arg();
            let unwrapped = if k == 0 {
                arg
            } else {
                let mut d = arg - previous.rem_euclid(std::f64::consts::TAU);
                d = (d + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
                    - std::f64::consts::PI;
                previous + d
            };
            phases.push(unwrapped);
            previous = unwrapped;
        }
        Ok(phases)
    }
}

/// Crank–Nicolson integration of `iħ ∂Ψ/∂t = ĤΨ`:
/// `(I + iΔtĤ/2ħ) Ψ_{k+1} = (I − iΔtĤ/2ħ) Ψ_k`.
///
/// The returned trajectory holds `steps + 1` states starting with `psi0`.
pub fn evolve(
    psi0: &WaveFunction,
    hamiltonian: &HermitianOperator,
    dt: f64,
    steps: usize,
    constants: PhysicalConstants,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    if steps == 0 {
        return Err(Error::Domain("at least one time step is required".into()));
    }
    let grid = psi0.grid();
    if grid != hamiltonian.grid() {
        return Err(Error::GridMismatch);
    }
    let n = grid.n();
    let tau = dt / (2.0 * constants.hbar);
    let h = hamiltonian.matrix();
    let implicit = Mat::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta + I * tau * h[(i, j)]
    });
    let lu = implicit.partial_piv_lu();

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(psi0.clone());
    let mut current = psi0.values().to_vec();
    for k in 1..=steps {
        let hpsi = hamiltonian.apply(&current)?;
        let rhs = Mat::from_fn(n, 1, |i, _| current[i] - I * tau * hpsi[i]);
        let next = lu.solve(&rhs);
        current = (0..n).map(|i| next[(i, 0)]).collect();
        if current.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::LinearSolve(format!("non-finite state at step {k}")));
        }
        let state = WaveFunction::from_normalized(grid.clone(), current.clone());
        let drift = (state.norm() - 1.0).abs();
        if drift > TRAJECTORY_NORM_TOLERANCE {
            return Err(Error::LinearSolve(format!(
                "norm drifted by {drift:e} at step {k}"
            )));
        }
        times.push(k as f64 * dt);
        states.push(state);
    }
    Ok(Trajectory { times, states })
}

/// Normalized superposition together with the factor that normalized it.
#[derive(Debug, Clone)]
pub struct Superposition {
    pub state: WaveFunction,
    /// `1 / ‖Σ α_i Ψ_i‖`.
    pub norm_factor: f64,
}

pub fn superpose(states: &[WaveFunction], coefficients: &[Complex64]) -> Result<Superposition> {
    check_len(states.len(), coefficients.len())?;
    let first = states
        .first()
        .ok_or_else(|| Error::Domain("superposition needs at least one state".into()))?;
    let grid = first.grid();
    if states.iter().any(|s| s.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let mut raw = vec![Complex64::new(0.0, 0.0); grid.n()];
    for (s, &a) in states.iter().zip(coefficients) {
        raw.iter_mut().zip(s.values()).for_each(|(r, v)| *r += a * v);
    }
    let norm = grid.norm(&raw)?;
    if !(norm > ZERO_NORM_THRESHOLD) {
        return Err(Error::ZeroNorm);
    }
    let norm_factor = 1.0 / norm;
    raw.iter_mut().for_each(|z| *z *= norm_factor);
    Ok(Superposition {
        state: WaveFunction::from_normalized(grid.clone(), raw),
        norm_factor,
    })
}

/// Largest distance, over all stored times, between evolving a superposition
/// and superposing the individually evolved states.
pub fn linearity_check(
    states: &[WaveFunction],
    coefficients: &[Complex64],
    hamiltonian: &HermitianOperator,
    dt: f64,
    steps: usize,
    constants: PhysicalConstants,
) -> Result<f64> {
    let combined = superpose(states, coefficients)?;
    let together = evolve(&combined.state, hamiltonian, dt, steps, constants)?;
    let separate = states
        .iter()
        .map(|s| evolve(s, hamiltonian, dt, steps, constants))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for k in 0..together.len() {
        let at_k: Vec<WaveFunction> = separate.iter().map(|t| t.states[k].clone()).collect();
        let recombined = superpose(&at_k, coefficients)?;
        worst = worst.max(recombined.state.distance(&together.states[k])?);
    }
    Ok(worst)
}

/// Residuals of the plane wave with grid-commensurate momentum
/// `p = 2πħ k / L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveCheck {
    pub momentum: f64,
    pub energy: f64,
    /// `‖p̂Ψ − pΨ‖`.
    pub momentum_residual: f64,
    /// `‖ĤΨ − (p²/2m)Ψ‖` with `V = 0`.
    pub energy_residual: f64,
}

pub fn plane_wave_eigencheck(
    k_index: i64,
    grid: &Grid,
    constants: PhysicalConstants,
) -> Result<PlaneWaveCheck> {
    if grid.boundary() != Boundary::Periodic {
        return Err(Error::NonPeriodicGrid);
    }
    let hbar = constants.hbar;
    let momentum = 2.0 * std::f64::consts::PI * hbar * k_index as f64 / grid.extent();
    let energy = momentum * momentum / (2.0 * constants.mass);
    let psi = WaveFunction::from_fn(grid.clone(), |x| Complex64::from_polar(1.0, momentum * x / hbar))?;
    let residual = |op: &HermitianOperator, value: f64| -> Result<f64> {
        let out = op.apply(psi.values())?;
        let r: Vec<Complex64> = out
            .iter()
            .zip(psi.values())
            .map(|(a, b)| a - value * b)
            .collect();
        grid.norm(&r)
    };
    Ok(PlaneWaveCheck {
        momentum,
        energy,
        momentum_residual: residual(&momentum_operator(grid, hbar), momentum)?,
        energy_residual: residual(&kinetic_operator(grid, constants), energy)?,
    })
}
