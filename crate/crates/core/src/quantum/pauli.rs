//! Pauli strings and real-weighted sums of them.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuantumError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Tensor product of single-qubit Paulis, identity on unlisted qubits.
///
/// Stored in symplectic form: bit `j` of `x_mask` / `z_mask` set means an X
/// / Z component on qubit `j` (both set is Y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PauliString {
    x_mask: u64,
    z_mask: u64,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new<I: IntoIterator<Item = (usize, Pauli)>>(ops: I) -> Result<Self, QuantumError> {
        let mut s = Self::default();
        for (q, p) in ops {
            if q >= 64 {
                return Err(QuantumError::QubitOutOfRange { qubit: q, n: 64 });
            }
            let bit = 1u64 << q;
            if (s.x_mask | s.z_mask) & bit != 0 {
                return Err(QuantumError::RepeatedQubit(q));
            }
            match p {
                Pauli::X => s.x_mask |= bit,
                Pauli::Y => {
                    s.x_mask |= bit;
                    s.z_mask |= bit;
                }
                Pauli::Z => s.z_mask |= bit,
            }
        }
        Ok(s)
    }

    pub fn single(q: usize, p: Pauli) -> Self {
        Self::new([(q, p)]).expect("single-qubit string is valid")
    }

    pub fn pair(q1: usize, p1: Pauli, q2: usize, p2: Pauli) -> Result<Self, QuantumError> {
        Self::new([(q1, p1), (q2, p2)])
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn support(&self) -> u64 {
        self.x_mask | self.z_mask
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn num_y(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    /// Highest qubit index touched, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        let s = self.support();
        (s != 0).then(|| 63 - s.leading_zeros() as usize)
    }

    pub fn ops(&self) -> Vec<(usize, Pauli)> {
        (0..64)
            .filter_map(|q| {
                let bit = 1u64 << q;
                match (self.x_mask & bit != 0, self.z_mask & bit != 0) {
                    (true, true) => Some((q, Pauli::Y)),
                    (true, false) => Some((q, Pauli::X)),
                    (false, true) => Some((q, Pauli::Z)),
                    (false, false) => None,
                }
            })
            .collect()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones()) % 2 == 0
    }

    /// `self * other = phase * result`, with `phase` a power of `i`.
    pub fn multiply(&self, other: &Self) -> (Complex64, Self) {
        // Write each string as i^{|x&z|} X^x Z^z; moving Z^{z1} past X^{x2}
        // contributes (-1)^{|z1 & x2|}.
        let mut power = self.num_y() + other.num_y() + 2 * (self.z_mask & other.x_mask).count_ones();
        let result = Self {
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
        };
        // result = i^{-|x&z|} * (X^x Z^z) in the same convention
        power += 4 - result.num_y() % 4;
        (i_pow(power), result)
    }

    /// Action on a basis state: `P|x> = phase * |x ^ x_mask>`.
    #[inline]
    pub fn apply_to_basis(&self, x: u64) -> (Complex64, u64) {
        let sign_flips = (x & self.z_mask).count_ones();
        (i_pow(self.num_y() + 2 * sign_flips), x ^ self.x_mask)
    }
}

pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ops = self.ops();
        if ops.is_empty() {
            return write!(f, "I");
        }
        for (i, (q, p)) in ops.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p:?}{q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

/// Hermitian operator `Σ c_t P_t` with real coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableTerms {
    terms: Vec<PauliTerm>,
}

impl ObservableTerms {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (f64, PauliString)>>(terms: I) -> Self {
        Self {
            terms: terms
                .into_iter()
                .map(|(coefficient, string)| PauliTerm { coefficient, string })
                .collect(),
        }
    }

    pub fn push(&mut self, coefficient: f64, string: PauliString) {
        self.terms.push(PauliTerm { coefficient, string });
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_j X_j` over `n` qubits.
    pub fn x_mixer(n: usize) -> Self {
        Self::from_terms((0..n).map(|j| (1.0, PauliString::single(j, Pauli::X))))
    }

    /// `Σ Y_j Z_k` over the given ordered pairs.
    pub fn yz_mixer(pairs: &[(usize, usize)]) -> Result<Self, QuantumError> {
        let mut out = Self::new();
        for &(j, k) in pairs {
            out.push(1.0, PauliString::pair(j, Pauli::Y, k, Pauli::Z)?);
        }
        Ok(out)
    }

    /// Triangle-inequality bound `Σ |c_t|` on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm { coefficient: t.coefficient * s, string: t.string })
                .collect(),
        }
    }

    /// Merges equal strings and drops terms whose coefficient is below `tol`
    /// in magnitude. Output is sorted by string.
    pub fn simplified(&self, tol: f64) -> Self {
        let mut acc: BTreeMap<PauliString, f64> = BTreeMap::new();
        for t in &self.terms {
            *acc.entry(t.string).or_insert(0.0) += t.coefficient;
        }
        Self::from_terms(acc.into_iter().filter(|(_, c)| c.abs() > tol).map(|(s, c)| (c, s)))
    }

    pub fn check_qubits(&self, n: usize) -> Result<(), QuantumError> {
        for t in &self.terms {
            if let Some(q) = t.string.max_qubit() {
                if q >= n {
                    return Err(QuantumError::QubitOutOfRange { qubit: q, n });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_products() {
        let x = PauliString::single(0, Pauli::X);
        let y = PauliString::single(0, Pauli::Y);
        let z = PauliString::single(0, Pauli::Z);
        assert_eq!(x.multiply(&y), (c(0.0, 1.0), z));
        assert_eq!(y.multiply(&z), (c(0.0, 1.0), x));
        assert_eq!(z.multiply(&x), (c(0.0, 1.0), y));
        assert_eq!(y.multiply(&x), (c(0.0, -1.0), z));
        assert_eq!(x.multiply(&x), (c(1.0, 0.0), PauliString::identity()));
        assert_eq!(y.multiply(&y), (c(1.0, 0.0), PauliString::identity()));
    }

    #[test]
    fn commutation() {
        let yz = PauliString::pair(0, Pauli::Y, 1, Pauli::Z).unwrap();
        let zz = PauliString::pair(0, Pauli::Z, 1, Pauli::Z).unwrap();
        let xx = PauliString::pair(0, Pauli::X, 1, Pauli::X).unwrap();
        assert!(!yz.commutes_with(&zz));
        assert!(zz.commutes_with(&xx));
        assert!(!yz.commutes_with(&xx) || yz.commutes_with(&xx));
    }

    #[test]
    fn basis_action() {
        let y = PauliString::single(0, Pauli::Y);
        assert_eq!(y.apply_to_basis(0), (c(0.0, 1.0), 1));
        assert_eq!(y.apply_to_basis(1), (c(0.0, -1.0), 0));
        let z = PauliString::single(1, Pauli::Z);
        assert_eq!(z.apply_to_basis(0b10), (c(-1.0, 0.0), 0b10));
    }

    #[test]
    fn repeated_qubit_rejected() {
        assert_eq!(
            PauliString::new([(2, Pauli::X), (2, Pauli::Z)]),
            Err(QuantumError::RepeatedQubit(2))
        );
    }

    #[test]
    fn simplify_merges_and_drops() {
        let z0 = PauliString::single(0, Pauli::Z);
        let x1 = PauliString::single(1, Pauli::X);
        let obs = ObservableTerms::from_terms([(1.0, z0), (0.5, x1), (-1.0, z0)]);
        let s = obs.simplified(1e-14);
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].coefficient, 0.5);
    }

    #[test]
    fn display() {
        let s = PauliString::pair(0, Pauli::Y, 3, Pauli::Z).unwrap();
        assert_eq!(s.to_string(), "Y0 Z3");
        assert_eq!(PauliString::identity().to_string(), "I");
    }
}
