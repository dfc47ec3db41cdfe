//! Statevector simulation laboratory for variational ground-state
//! estimation: plain VQE, multiplicative neural post-processing (VQNHE),
//! and its unitary phase-only variant (U-VQNHE), together with the
//! shot-noise analyses that separate the two.
//!
//! Everything is generic over the floating-point scalar through
//! [`scalar::Real`]; the aliases at the crate root fix `f64`, which is what
//! the CLI and the documented tolerances use.

pub mod analysis;
pub mod ansatz;
pub mod bits;
pub mod eigen;
pub mod error;
pub mod estimator;
pub mod gate;
pub mod hamiltonian;
pub mod measurement;
pub mod neural;
pub mod optim;
pub mod pauli;
pub mod sampler;
pub mod scalar;
pub mod state;
pub mod training;

pub use error::{Error, Result};
pub use scalar::{Real, C};

/// `f64` statevector.
pub type Statevector = state::Statevector<f64>;
/// `f64` circuit.
pub type Circuit = gate::Circuit<f64>;
/// `f64` gate.
pub type Gate = gate::Gate<f64>;
/// `f64` Hamiltonian.
pub type Hamiltonian = hamiltonian::Hamiltonian<f64>;
/// `f64` Hamiltonian term.
pub type HamiltonianTerm = hamiltonian::HamiltonianTerm<f64>;
/// `f64` neural network.
pub type MlpNetwork = neural::MlpNetwork<f64>;
/// `f64` divergence report.
pub type DivergenceReport = analysis::DivergenceReport<f64>;
/// `f64` variance forecast.
pub type VarianceReport = analysis::VarianceReport<f64>;
