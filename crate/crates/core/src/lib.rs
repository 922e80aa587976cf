//! Toolkit for the two-body ruby-lattice model whose strong-coupling phase is
//! the topological color code.
//!
//! - [`pauli`]: exact Pauli algebra in binary symplectic form.
//! - [`lattice`]: ruby lattice, contracted honeycomb 2-colex and square lattice
//!   on the torus.
//! - [`hamiltonian`]: two-body, toric, color-code and effective Hamiltonians.
//! - [`iom`]: discovery and verification of integrals of motion.
//! - [`code`]: stabilizer groups, logical qubits, syndromes, charges.
//! - [`spectral`]: matrix-free exact diagonalization.
//! - [`cli`]: run configuration and task dispatch for the binary.

pub mod cli;
pub mod code;
pub mod error;
pub mod gf2;
pub mod hamiltonian;
pub mod iom;
pub mod lattice;
pub mod pauli;
pub mod spectral;

pub use error::{Error, Result};
pub use pauli::{PauliKind, PauliOperator, Phase};

/// Crate version, stamped into every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
