//! 2N-qubit resource states and their `2^N × 2^N` channel matrices.
//!
//! The first N qubits of the state belong to Alice (rows of `E`), the last N
//! to Bob (columns of `E`). States wired as interleaved pairs must be
//! permuted into this layout first, see [`StateVector::permute_qubits`].

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{QtelError, Result};
use crate::magic::hill_wootters_basis;
use crate::matrix::{ComplexMatrix, ScaledIdentityCheck, StateVector, Tolerance, C64, ONE, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    n: usize,
    state: StateVector,
    e_matrix: ComplexMatrix,
}

impl Channel {
    /// Splits each basis index as `i = j·2^n + k` and stores `E[j][k]`.
    pub fn from_state(state: StateVector, n: usize, tol: Tolerance) -> Result<Self> {
        if n == 0 || state.n_qubits() != 2 * n {
            return Err(QtelError::shape(
                "channel_from_state",
                format!(
                    "{}-qubit state cannot split into two {n}-qubit halves",
                    state.n_qubits()
                ),
            ));
        }
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > tol.eps() {
            return Err(QtelError::Validation {
                what: "channel state is not normalized".into(),
                deviation: (norm - 1.0).abs(),
            });
        }
        let e_matrix = state.to_matrix(n)?;
        Ok(Self { n, state, e_matrix })
    }

    /// Channel whose matrix is `e`; `Tr(E†E)` must be 1.
    pub fn from_matrix(e: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if !e.is_square() || !e.rows().is_power_of_two() || e.rows() < 2 {
            return Err(QtelError::shape(
                "Channel::from_matrix",
                format!("{}x{} is not 2^n x 2^n", e.rows(), e.cols()),
            ));
        }
        let n = e.rows().trailing_zeros() as usize;
        Self::from_state(StateVector::from_matrix(&e)?, n, tol)
    }

    /// `n` Bell pairs `(|00⟩+|11⟩)/√2`, pair `r` shared between `A_r` and `B_r`.
    /// The matrix is `2^{-n/2}·1`.
    pub fn bell_pairs(n: usize) -> Result<Self> {
        let pair = StateVector::new(
            2,
            vec![
                C64::new(FRAC_1_SQRT_2, 0.0),
                ZERO,
                ZERO,
                C64::new(FRAC_1_SQRT_2, 0.0),
            ],
        )?;
        let mut wired = pair.clone();
        for _ in 1..n {
            wired = wired.kron(&pair)?;
        }
        // Physical order A1 B1 A2 B2 …; regroup as A1 … An B1 … Bn.
        let order: Vec<usize> = (0..n)
            .map(|r| 2 * r)
            .chain((0..n).map(|r| 2 * r + 1))
            .collect();
        Self::from_state(wired.permute_qubits(&order)?, n, Tolerance::default())
    }

    /// `(|0…0⟩ + |1…1⟩)/√2` on `2n` qubits.
    pub fn ghz(n: usize) -> Result<Self> {
        let dim = 1usize << (2 * n);
        let mut amps = vec![ZERO; dim];
        amps[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        amps[dim - 1] = C64::new(FRAC_1_SQRT_2, 0.0);
        Self::from_state(StateVector::new(2 * n, amps)?, n, Tolerance::default())
    }

    /// Single-qubit channel `a|00⟩ + b|11⟩` with `a = √λ`, `b = √(1−λ)`.
    pub fn schmidt_1q(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(QtelError::Domain(format!(
                "λ must lie in [0, 1], got {lambda}"
            )));
        }
        let amps = vec![
            C64::new(lambda.sqrt(), 0.0),
            ZERO,
            ZERO,
            C64::new((1.0 - lambda).sqrt(), 0.0),
        ];
        Self::from_state(StateVector::new(2, amps)?, 1, Tolerance::default())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn e_matrix(&self) -> &ComplexMatrix {
        &self.e_matrix
    }

    /// Compares `E†E` against `2^{-n}·1`.
    pub fn is_perfect(&self, tol: Tolerance) -> ScaledIdentityCheck {
        self.e_matrix
            .dagger()
            .matmul(&self.e_matrix)
            .and_then(|m| m.is_scaled_identity(2f64.powi(-(self.n as i32)), tol))
            .expect("E is square by construction")
    }

    /// `2^{n/2}·E`, unitary exactly for perfect channels.
    pub fn character_matrix(&self) -> ComplexMatrix {
        self.e_matrix.scale_real(2f64.powf(self.n as f64 / 2.0))
    }

    /// Singular values of `E` (Schmidt coefficients across the A|B cut) for
    /// single-qubit-per-side channels, largest first.
    pub fn schmidt_coefficients_1q(&self) -> Result<[f64; 2]> {
        if self.n != 1 {
            return Err(QtelError::Domain(format!(
                "Schmidt coefficients implemented for n = 1, got n = {}",
                self.n
            )));
        }
        let g = self.e_matrix.dagger().matmul(&self.e_matrix)?;
        let a = g[(0, 0)].re;
        let d = g[(1, 1)].re;
        let b = g[(0, 1)].norm();
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let hi = (mean + half_gap).max(0.0).sqrt();
        let lo = (mean - half_gap).max(0.0).sqrt();
        Ok([hi, lo])
    }
}

/// Concurrence `|Σ c_i²|` of a two-qubit pure state, with `c_i` its
/// coefficients in the magic basis.
pub fn concurrence_2q(state: &StateVector) -> Result<f64> {
    if state.n_qubits() != 2 {
        return Err(QtelError::shape(
            "concurrence_2q",
            format!("expected 2 qubits, got {}", state.n_qubits()),
        ));
    }
    let sum: C64 = hill_wootters_basis()
        .iter()
        .map(|e| {
            let c = e.inner(state).expect("both two-qubit");
            c * c
        })
        .fold(ZERO, |acc, z| acc + z);
    Ok(sum.norm())
}

/// Reference Bell pair `(|00⟩+|11⟩)/√2`.
pub fn phi_plus() -> StateVector {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::new(2, vec![s, ZERO, ZERO, s]).expect("valid")
}

/// `|0…0⟩` repeated; handy separable reference.
pub fn zero_state(n_qubits: usize) -> Result<StateVector> {
    let mut amps = vec![ZERO; 1usize << n_qubits];
    amps[0] = ONE;
    StateVector::new(n_qubits, amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: f64 = FRAC_1_SQRT_2;

    #[test]
    fn bell_pair_matrix() {
        let ch = Channel::from_state(phi_plus(), 1, Tolerance::default()).unwrap();
        assert!(
            ch.e_matrix()
                .max_abs_diff(&ComplexMatrix::identity(2).scale_real(S))
                .unwrap()
                < 1e-15
        );
        assert!(ch.is_perfect(Tolerance::default()).holds);
        assert!(
            ch.character_matrix()
                .max_abs_diff(&ComplexMatrix::identity(2))
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn two_bell_pairs_matrix() {
        let ch = Channel::bell_pairs(2).unwrap();
        assert!(
            ch.e_matrix()
                .max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.5))
                .unwrap()
                < 1e-15
        );
        assert!(
            ch.character_matrix()
                .max_abs_diff(&ComplexMatrix::identity(4))
                .unwrap()
                < 1e-15
        );
        assert!(ch.is_perfect(Tolerance::default()).holds);
    }

    #[test]
    fn ghz4_corner_matrix() {
        let ch = Channel::ghz(2).unwrap();
        let e = ch.e_matrix();
        for j in 0..4 {
            for k in 0..4 {
                let expect = if (j, k) == (0, 0) || (j, k) == (3, 3) {
                    S
                } else {
                    0.0
                };
                assert!((e[(j, k)] - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
        let chk = ch.is_perfect(Tolerance::default());
        assert!(!chk.holds);
        assert!((chk.max_deviation - 0.25).abs() < 1e-15);
        let chi = ch.character_matrix();
        assert_eq!(
            (0..4)
                .filter(|&r| (0..4).all(|c| chi[(r, c)] == ZERO))
                .count(),
            2
        );
    }

    #[test]
    fn shape_and_normalization_errors() {
        assert!(matches!(
            Channel::from_state(phi_plus(), 2, Tolerance::default()),
            Err(QtelError::Shape { .. })
        ));
        let unnormalized = phi_plus().scale(C64::new(2.0, 0.0));
        assert!(matches!(
            Channel::from_state(unnormalized, 1, Tolerance::default()),
            Err(QtelError::Validation { .. })
        ));
    }

    #[test]
    fn concurrence_endpoints() {
        assert!((concurrence_2q(&phi_plus()).unwrap() - 1.0).abs() < 1e-15);
        assert!(concurrence_2q(&zero_state(2).unwrap()).unwrap() < 1e-15);
        assert!(concurrence_2q(&zero_state(3).unwrap()).is_err());
    }

    #[test]
    fn schmidt_of_weighted_pair() {
        let ch = Channel::schmidt_1q(0.8).unwrap();
        let [hi, lo] = ch.schmidt_coefficients_1q().unwrap();
        assert!((hi - 0.8f64.sqrt()).abs() < 1e-12);
        assert!((lo - 0.2f64.sqrt()).abs() < 1e-12);
        assert!(Channel::schmidt_1q(1.5).is_err());
    }
}
