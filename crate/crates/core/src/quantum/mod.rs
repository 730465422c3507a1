//! Dense statevector simulation.
//!
//! Qubit `j` is bit `j` of the basis index (least-significant bit is qubit 0).
//! Expectation values are computed exactly from the amplitudes; there is no
//! shot sampling.

mod pauli;
mod state;

pub use pauli::{ObservableTerms, Pauli, PauliString, PauliTerm};
pub use state::{
    apply_diagonal_phase, apply_rx, apply_ryz, apply_rzz, expectation_diagonal, expectation_pauli,
    feedback_observable, init_plus, StateVector,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    #[error("{n} qubits exceeds the configured cap of {cap}")]
    AboveCap { n: usize, cap: usize },
    #[error("need at least one qubit")]
    NoQubits,
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    RepeatedQubit(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}
