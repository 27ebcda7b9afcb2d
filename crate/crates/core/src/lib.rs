//! Statistical averages, uncertainty relations, Hermitian spectra,
//! Schrödinger dynamics and their classical correspondence on uniform 1D
//! grids.

pub mod classical;
pub mod correspondence;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod quantum;
pub mod sampling;
pub mod spectral;
pub mod stability;

pub use classical::{
    classical_average, classical_uncertainty_check, ClassicalObservable, ProbabilityDensity,
    UncertaintyReport, Verdict,
};
pub use correspondence::{CrossTermReport, MixtureEnsemble};
pub use dynamics::{PhysicalConstants, Trajectory};
pub use error::{Error, Result};
pub use grid::{Boundary, Grid};
pub use num_complex::Complex64;
pub use quantum::{expectation, quantum_uncertainty_check, HermitianOperator, WaveFunction};
pub use spectral::{diagonalize, SpectralDecomposition};
pub use stability::AtomParameters;
