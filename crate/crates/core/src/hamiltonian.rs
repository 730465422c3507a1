//! The Max-Cut cost Hamiltonian `H_f = Σ_{(u,v)} (I - Z_u Z_v) / 2`, its
//! diagonal table, symbolic commutators with mixers, and the operator-norm
//! bounds that feed the step-size certificate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::quantum::{ObservableTerms, Pauli, PauliString, QuantumError, StateVector};
use crate::DEFAULT_STATE_CAP;

#[derive(Debug, Error, PartialEq)]
pub enum HamiltonianError {
    #[error("{n} vertices exceeds the configured cap of {cap}")]
    AboveCap { n: usize, cap: usize },
    #[error("{m} edges does not fit the 16-bit diagonal table")]
    TooManyEdges { m: usize },
    #[error("unsupported mixer term {0}: only strings of weight 1 or 2 are expanded")]
    UnsupportedTerm(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// `H_f` materialized as its per-basis cut values.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxCutHamiltonian {
    graph: Graph,
    diag: Vec<u16>,
    max_cut: u16,
}

/// Builds `H_f` for `g` with the default size cap.
pub fn build_maxcut(g: &Graph) -> Result<MaxCutHamiltonian, HamiltonianError> {
    MaxCutHamiltonian::new(g, DEFAULT_STATE_CAP)
}

impl MaxCutHamiltonian {
    /// Fills the cut table in `O(2^n)`: clearing the top set bit `h` of `x`
    /// changes the cut by `deg(h) - 2 |N(h) ∩ x|`.
    pub fn new(g: &Graph, cap: usize) -> Result<Self, HamiltonianError> {
        let n = g.n();
        if n > cap {
            return Err(HamiltonianError::AboveCap { n, cap });
        }
        if g.m() > u16::MAX as usize {
            return Err(HamiltonianError::TooManyEdges { m: g.m() });
        }
        let mut nbr_mask = vec![0usize; n];
        for &(u, v) in g.edges() {
            nbr_mask[u] |= 1 << v;
            nbr_mask[v] |= 1 << u;
        }
        let degree: Vec<i32> = nbr_mask.iter().map(|m| m.count_ones() as i32).collect();
        let mut diag = vec![0u16; 1 << n];
        for x in 1usize..(1 << n) {
            let h = (usize::BITS - 1 - x.leading_zeros()) as usize;
            let rest = x & !(1 << h);
            let delta = degree[h] - 2 * (rest & nbr_mask[h]).count_ones() as i32;
            diag[x] = (diag[rest] as i32 + delta) as u16;
        }
        let max_cut = diag.iter().copied().max().unwrap_or(0);
        Ok(Self { graph: g.clone(), diag, max_cut })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn diag(&self) -> &[u16] {
        &self.diag
    }

    /// Exact spectral norm: `H_f` is diagonal and nonnegative.
    pub fn norm(&self) -> f64 {
        self.max_cut as f64
    }

    pub fn max_cut(&self) -> usize {
        self.max_cut as usize
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64, QuantumError> {
        crate::quantum::expectation_diagonal(state, &self.diag)
    }

    /// `exp(-i γ H_f)` through a phase table indexed by cut value.
    pub fn evolve(&self, state: &mut StateVector, gamma: f64) -> Result<(), QuantumError> {
        if state.dim() != self.diag.len() {
            return Err(QuantumError::LengthMismatch { expected: self.diag.len(), got: state.dim() });
        }
        let table: Vec<Complex64> = (0..=self.max_cut)
            .map(|c| Complex64::from_polar(1.0, -gamma * c as f64))
            .collect();
        for (a, &d) in state.amplitudes_mut().iter_mut().zip(&self.diag) {
            *a *= table[d as usize];
        }
        Ok(())
    }

    /// `H_f` as a Pauli sum: `m/2 · I - Σ Z_u Z_v / 2`.
    pub fn pauli_terms(&self) -> ObservableTerms {
        let mut out = ObservableTerms::new();
        out.push(self.m() as f64 / 2.0, PauliString::identity());
        for &(u, v) in self.graph.edges() {
            out.push(-0.5, PauliString::pair(u, Pauli::Z, v, Pauli::Z).expect("edge endpoints differ"));
        }
        out
    }
}

/// Symbolic expansion of `i[A, H_f]` into a Hermitian Pauli sum.
///
/// For each mixer string `P` and edge `(u, v)` anticommuting with it,
/// `i[c P, -Z_u Z_v / 2] = -i c P Z_u Z_v`, which is real-weighted because
/// the product of anticommuting Paulis carries a phase of `±i`.
pub fn commutator_terms(mixer: &ObservableTerms, h: &MaxCutHamiltonian) -> Result<ObservableTerms, HamiltonianError> {
    mixer.check_qubits(h.n())?;
    let mut out = ObservableTerms::new();
    for term in mixer.terms() {
        let w = term.string.weight();
        if w == 0 || w > 2 {
            return Err(HamiltonianError::UnsupportedTerm(term.string.to_string()));
        }
        for &(u, v) in h.graph.edges() {
            let zz = PauliString::pair(u, Pauli::Z, v, Pauli::Z).expect("edge endpoints differ");
            if term.string.commutes_with(&zz) {
                continue;
            }
            let (phase, product) = term.string.multiply(&zz);
            let coeff = Complex64::new(0.0, -term.coefficient) * phase;
            debug_assert!(coeff.im.abs() < 1e-12);
            out.push(coeff.re, product);
        }
    }
    Ok(out.simplified(0.0))
}

/// One Hamiltonian component `coefficient · H_k` with a norm bound on `H_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerTerm {
    pub coefficient: f64,
    pub norm: f64,
}

impl LayerTerm {
    pub fn new(coefficient: f64, norm: f64) -> Self {
        Self { coefficient, norm }
    }

    /// Weighted Pauli sum bounded by `Σ |c_t|`.
    pub fn pauli_sum(coefficient: f64, terms: &ObservableTerms) -> Self {
        Self { coefficient, norm: terms.norm_bound() }
    }

    pub fn weighted_norm(&self) -> f64 {
        self.coefficient.abs() * self.norm
    }
}

/// Operator-norm bounds and the error constants `A`, `B`, `C` of the
/// one-step certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub hf_norm: f64,
    pub phase_norm: f64,
    pub mixer_norm: f64,
    pub full_norm: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Error constants for one step with commuting components `phase_terms`
/// (`η_k H^f_k`) and non-commuting components `mixer_terms` (`α_k H^f̂_k`).
///
/// `A = 2‖H_f‖‖H^f̂‖‖H‖`, `C = ‖H‖`, and `B = 2‖H_f‖ (Σ_k ‖η_k H^f_k‖ +
/// Σ_{k<n₂} ‖α_k H^f̂_k‖ + ‖Σ_k η_k H^f_k + Σ_{k<n₂} α_k H^f̂_k‖)`, where the
/// mixer sums stop one short of the last component. Every norm except
/// `‖H_f‖` is replaced by its triangle-inequality bound.
pub fn error_constants(h: &MaxCutHamiltonian, phase_terms: &[LayerTerm], mixer_terms: &[LayerTerm]) -> NormBounds {
    let hf_norm = h.norm();
    let phase_norm: f64 = phase_terms.iter().map(LayerTerm::weighted_norm).sum();
    let mixer_norm: f64 = mixer_terms.iter().map(LayerTerm::weighted_norm).sum();
    let full_norm = phase_norm + mixer_norm;
    let leading_mixers: f64 = mixer_terms
        .iter()
        .take(mixer_terms.len().saturating_sub(1))
        .map(LayerTerm::weighted_norm)
        .sum();
    let partial = phase_norm + leading_mixers;
    NormBounds {
        hf_norm,
        phase_norm,
        mixer_norm,
        full_norm,
        a: 2.0 * hf_norm * mixer_norm * full_norm,
        b: 2.0 * hf_norm * (partial + partial),
        c: full_norm,
    }
}
