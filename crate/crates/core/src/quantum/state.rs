use num_complex::Complex64;

use super::{ObservableTerms, QuantumError};
use crate::DEFAULT_STATE_CAP;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QuantumError::LengthMismatch { expected: len.next_power_of_two().max(2), got: len });
        }
        Ok(Self { n_qubits: len.trailing_zeros() as usize, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self, QuantumError> {
        check_size(n, DEFAULT_STATE_CAP)?;
        if index >= 1 << n {
            return Err(QuantumError::LengthMismatch { expected: 1 << n, got: index });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Debug dump: JSON array of `[re, im]` pairs in index order.
    pub fn to_json(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.amps.iter().map(|a| [a.re, a.im]).collect();
        serde_json::to_string(&pairs).expect("finite amplitudes serialize")
    }

    fn check_qubit(&self, q: usize) -> Result<(), QuantumError> {
        if q >= self.n_qubits {
            return Err(QuantumError::QubitOutOfRange { qubit: q, n: self.n_qubits });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<(), QuantumError> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(QuantumError::RepeatedQubit(a));
        }
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<(), QuantumError> {
        if len != self.amps.len() {
            return Err(QuantumError::LengthMismatch { expected: self.amps.len(), got: len });
        }
        Ok(())
    }
}

fn check_size(n: usize, cap: usize) -> Result<(), QuantumError> {
    if n == 0 {
        return Err(QuantumError::NoQubits);
    }
    if n > cap {
        return Err(QuantumError::AboveCap { n, cap });
    }
    Ok(())
}

/// `|+>^n` with the default qubit cap.
pub fn init_plus(n: usize) -> Result<StateVector, QuantumError> {
    StateVector::plus_capped(n, DEFAULT_STATE_CAP)
}

impl StateVector {
    pub fn plus_capped(n: usize, cap: usize) -> Result<Self, QuantumError> {
        check_size(n, cap)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self { n_qubits: n, amps: vec![a; dim] })
    }
}

/// `exp(-i θ X_q)`.
pub fn apply_rx(state: &mut StateVector, qubit: usize, theta: f64) -> Result<(), QuantumError> {
    state.check_qubit(qubit)?;
    let (s, c) = theta.sin_cos();
    let bit = 1usize << qubit;
    for block in state.amps.chunks_exact_mut(2 * bit) {
        let (lo, hi) = block.split_at_mut(bit);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            // [[c, -is], [-is, c]]
            *a = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
            *b = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
        }
    }
    Ok(())
}

/// `exp(-i θ Z_{q1} Z_{q2})`.
pub fn apply_rzz(state: &mut StateVector, q1: usize, q2: usize, theta: f64) -> Result<(), QuantumError> {
    state.check_pair(q1, q2)?;
    let same = Complex64::from_polar(1.0, -theta);
    let diff = Complex64::from_polar(1.0, theta);
    for (i, a) in state.amps.iter_mut().enumerate() {
        let parity = ((i >> q1) ^ (i >> q2)) & 1;
        *a *= if parity == 0 { same } else { diff };
    }
    Ok(())
}

/// `exp(-i θ Y_{qy} Z_{qz})`.
///
/// On each pair of amplitudes differing in bit `qy`, with `s = (-1)^{bit qz}`,
/// this is the real rotation `a' = cos θ a - s sin θ b`,
/// `b' = cos θ b + s sin θ a`.
pub fn apply_ryz(state: &mut StateVector, qy: usize, qz: usize, theta: f64) -> Result<(), QuantumError> {
    state.check_pair(qy, qz)?;
    let (s, c) = theta.sin_cos();
    let ybit = 1usize << qy;
    let zbit = 1usize << qz;
    for (k, block) in state.amps.chunks_exact_mut(2 * ybit).enumerate() {
        let start = k * 2 * ybit;
        let (lo, hi) = block.split_at_mut(ybit);
        for (off, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            let sign = if (start + off) & zbit == 0 { s } else { -s };
            let (x, y) = (*a, *b);
            *a = x * c - y * sign;
            *b = y * c + x * sign;
        }
    }
    Ok(())
}

/// `exp(-i γ D)` for a diagonal operator given by its per-basis values.
pub fn apply_diagonal_phase<T>(state: &mut StateVector, diag: &[T], gamma: f64) -> Result<(), QuantumError>
where
    T: Copy + Into<f64>,
{
    state.check_len(diag.len())?;
    for (a, &d) in state.amps.iter_mut().zip(diag) {
        *a *= Complex64::from_polar(1.0, -gamma * d.into());
    }
    Ok(())
}

/// `Σ_x |ψ_x|² D_x`.
pub fn expectation_diagonal<T>(state: &StateVector, diag: &[T]) -> Result<f64, QuantumError>
where
    T: Copy + Into<f64>,
{
    state.check_len(diag.len())?;
    Ok(state.amps.iter().zip(diag).map(|(a, &d)| a.norm_sqr() * d.into()).sum())
}

/// `<ψ| Σ c_t P_t |ψ>`.
pub fn expectation_pauli(state: &StateVector, terms: &ObservableTerms) -> Result<f64, QuantumError> {
    terms.check_qubits(state.n_qubits)?;
    Ok(terms
        .terms()
        .iter()
        .map(|t| t.coefficient * matrix_element(&state.amps, &state.amps, &t.string).re)
        .sum())
}

/// `<bra| P |ket>`.
fn matrix_element(bra: &[Complex64], ket: &[Complex64], p: &super::PauliString) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, &k) in ket.iter().enumerate() {
        let (phase, y) = p.apply_to_basis(x as u64);
        acc += bra[y as usize].conj() * phase * k;
    }
    acc
}

/// Feedback observable `<ψ| i[A, H] |ψ>` for Hermitian `A` and diagonal `H`.
///
/// Evaluated as `-2 Im <ψ| A (H ψ)>`, which costs one pass per term of `A`
/// instead of materializing the commutator.
pub fn feedback_observable<T>(state: &StateVector, mixer: &ObservableTerms, diag: &[T]) -> Result<f64, QuantumError>
where
    T: Copy + Into<f64>,
{
    state.check_len(diag.len())?;
    mixer.check_qubits(state.n_qubits)?;
    let h_psi: Vec<Complex64> = state.amps.iter().zip(diag).map(|(&a, &d)| a * d.into()).collect();
    let value: f64 = mixer
        .terms()
        .iter()
        .map(|t| t.coefficient * matrix_element(&state.amps, &h_psi, &t.string).im)
        .sum();
    Ok(-2.0 * value)
}
