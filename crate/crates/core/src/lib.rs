//! Variational Monte Carlo ground-state solver for quantum spin chains and
//! small fermionic Hamiltonians, using a hybrid wavefunction: a simulated
//! parameterized quantum circuit multiplied by an autoregressive Transformer
//! ansatz, trained by stochastic reconfiguration or Adam on
//! importance-sampled estimators.
//!
//! The crate is generic over the floating-point scalar through
//! [`scalar::Scalar`]; the [`f64`]-based aliases at the root are the types
//! most users want.

pub mod autodiff;
pub mod checkpoint;
pub mod circuit;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod fermion;
pub mod io;
pub mod mask;
pub mod optim;
pub mod oracle;
pub mod pauli;
pub mod phase_net;
pub mod sampling;
pub mod scalar;
pub mod seeds;
pub mod transformer;
pub mod wavefunction;

pub use error::{CoreError, Result};
pub use pauli::{Configuration, Hamiltonian, PauliString};
pub use scalar::Scalar;

/// Default-precision Hamiltonian.
pub type Hamiltonian64 = pauli::Hamiltonian<f64>;
