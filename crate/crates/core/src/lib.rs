//! Lyapunov-certified measurement-feedback quantum optimization for Max-Cut.
//!
//! The crate simulates a feedback-controlled QAOA-style evolution on a dense
//! statevector and tracks two running certificates (a one-parameter and a
//! two-parameter Lyapunov tracker) that lower-bound the approximation ratio
//! without knowing the optimum. Alongside the certificates it computes the
//! true ratio against an exhaustive Max-Cut oracle, so the bounds can be
//! checked step by step.
//!
//! Module map:
//!
//! - [`graph`]: instances, generators, the brute-force oracle, edge coloring.
//! - [`quantum`]: statevector, gate kernels, Pauli observables.
//! - [`hamiltonian`]: the Max-Cut diagonal, symbolic commutators, norm bounds.
//! - [`lyapunov`]: certificate trackers and the admissible step size.
//! - [`dynamics`]: the feedback loop for the QAOA and light-cone ansatzes.
//! - [`experiments`]: suites, statistics, persistence, plots.

pub mod dynamics;
pub mod experiments;
pub mod graph;
pub mod hamiltonian;
pub mod lyapunov;
pub mod quantum;

/// Largest qubit / vertex count accepted by the dense kernels.
pub const DEFAULT_STATE_CAP: usize = 24;
