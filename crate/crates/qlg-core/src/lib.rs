//! Simulation and analysis toolkit for a dephasing qubit coupled to a single
//! environment spin.
//!
//! The crate provides:
//!
//! - [`qcore`]: exact 2x2 / 4x4 complex linear algebra for states and
//!   observables (partial trace, trace norm, fidelity, Pauli decomposition);
//! - [`model`]: closed-form physics of the Ising-coupled pair — joint
//!   propagator, dephasing factor, time-local master-equation coefficients,
//!   trace-distance witness, Markovianity threshold, and a brute-force joint
//!   evolution oracle;
//! - [`witness`]: temporal-inequality evaluators built from conditional
//!   probabilities and two-time correlators;
//! - [`tomo`]: master-equation tomography from magnetization traces and from
//!   sampled channel matrices;
//! - [`nonmarkov`]: divisibility and trace-distance (information back-flow)
//!   witnesses plus Markovianity classification;
//! - [`pulse`]: idealized pulse-sequence simulation — pseudo-pure state
//!   preparation, input-state preparation, and XY-8 effective-coupling
//!   scheduling.
//!
//! All public values are immutable after construction and the functions are
//! pure, so everything can be shared freely across threads.

pub mod error;
pub mod model;
pub mod nonmarkov;
pub mod pulse;
pub mod qcore;
pub mod series;
pub mod tomo;
pub mod witness;

pub use error::{Error, Result};
pub use qcore::{ComplexMatrix, DensityMatrix, Ket};
