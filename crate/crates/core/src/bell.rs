//! Generalized Bell measurement bases on `2n` qubits, stored as their
//! `2^n × 2^n` coefficient matrices (rows: information register, columns:
//! Alice's half of the channel).

use crate::channel::Channel;
use crate::error::{QtelError, Result};
use crate::matrix::{ComplexMatrix, ScaledIdentityCheck, StateVector, Tolerance, C64, ONE, ZERO};
use crate::pauli::PauliString;

#[derive(Debug, Clone, PartialEq)]
pub struct BellBasis {
    n: usize,
    members: Vec<ComplexMatrix>,
}

impl BellBasis {
    /// Accepts an arbitrary family after checking member normalization,
    /// pairwise orthogonality and completeness.
    pub fn from_members(n: usize, members: Vec<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        let dim = 1usize << n;
        if n == 0 || members.len() != dim * dim {
            return Err(QtelError::shape(
                "BellBasis::from_members",
                format!("{} members for n = {n}, need {}", members.len(), dim * dim),
            ));
        }
        if let Some(m) = members.iter().find(|m| m.rows() != dim || m.cols() != dim) {
            return Err(QtelError::shape(
                "BellBasis::from_members",
                format!("member is {}x{}, need {dim}x{dim}", m.rows(), m.cols()),
            ));
        }
        let basis = Self { n, members };
        let ortho = basis.orthonormality_deviation();
        if ortho > tol.eps() {
            return Err(QtelError::Validation {
                what: "members are not orthonormal".into(),
                deviation: ortho,
            });
        }
        let complete = basis.verify_completeness(tol);
        if !complete.holds {
            return Err(QtelError::Validation {
                what: "members do not resolve the identity".into(),
                deviation: complete.max_deviation,
            });
        }
        Ok(basis)
    }

    /// Builds member `α` as `σ^(α)|B^(0)⟩`, with `σ^(α)` the phase-free Pauli
    /// string of quaternary index `α` acting on the first `n` qubits.
    pub fn generate_from_seed(seed: &StateVector, tol: Tolerance) -> Result<Self> {
        if !seed.n_qubits().is_multiple_of(2) {
            return Err(QtelError::shape(
                "generate_from_seed",
                format!("seed has an odd qubit count {}", seed.n_qubits()),
            ));
        }
        let n = seed.n_qubits() / 2;
        let seed_channel = Channel::from_state(seed.clone(), n, tol)?;
        let check = seed_channel.is_perfect(tol);
        if !check.holds {
            return Err(QtelError::Validation {
                what: "seed is not maximally entangled (B†B ≠ 2^-n·1)".into(),
                deviation: check.max_deviation,
            });
        }
        let b0 = seed_channel.e_matrix();
        let members = (0..1usize << (2 * n))
            .map(|alpha| PauliString::from_alpha(alpha, n)?.matrix().matmul(b0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, members })
    }

    /// Basis generated from `n` Bell pairs `(|00⟩+|11⟩)/√2`, each shared
    /// between information qubit `r` and Alice's qubit `r`.
    pub fn standard(n: usize) -> Result<Self> {
        let seed = Channel::bell_pairs(n)?;
        Self::generate_from_seed(seed.state(), Tolerance::default())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.members
    }

    pub fn member(&self, alpha: usize) -> Result<&ComplexMatrix> {
        self.members.get(alpha).ok_or_else(|| {
            QtelError::Domain(format!(
                "outcome index {alpha} out of range (basis has {} members)",
                self.members.len()
            ))
        })
    }

    /// Member `α` as a `2n`-qubit state.
    pub fn state(&self, alpha: usize) -> Result<StateVector> {
        StateVector::from_matrix(self.member(alpha)?)
    }

    /// Largest entry of `|G − 1|` for the Frobenius Gram matrix `G`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, ma) in self.members.iter().enumerate() {
            for (b, mb) in self.members.iter().enumerate().skip(a) {
                let g = ma.frobenius_inner(mb).expect("equal shapes");
                let target = if a == b { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// `Σ_α B_ij B*_kl = δ_ik δ_jl` over every index quadruple.
    pub fn verify_completeness(&self, tol: Tolerance) -> ScaledIdentityCheck {
        let dim = 1usize << self.n;
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let sum: C64 = self
                            .members
                            .iter()
                            .map(|b| b[(i, j)] * b[(k, l)].conj())
                            .sum();
                        let target = if i == k && j == l { ONE } else { ZERO };
                        worst = worst.max((sum - target).norm());
                    }
                }
            }
        }
        ScaledIdentityCheck {
            holds: worst <= tol.eps(),
            max_deviation: worst,
        }
    }

    /// Compares `B^(α)†B^(α)` against `2^{-n}·1`.
    pub fn is_maximal_member(&self, alpha: usize, tol: Tolerance) -> Result<ScaledIdentityCheck> {
        let b = self.member(alpha)?;
        b.dagger()
            .matmul(b)?
            .is_scaled_identity(2f64.powi(-(self.n as i32)), tol)
    }

    /// Replaces member `alpha` without running any checks. Test helper for
    /// building deliberately broken families.
    pub fn with_member_unchecked(mut self, alpha: usize, m: ComplexMatrix) -> Self {
        self.members[alpha] = m;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{phi_plus, zero_state};
    use crate::pauli::Pauli;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn standard_n1_members() {
        let b = BellBasis::standard(1).unwrap();
        let expected = [Pauli::I, Pauli::Z, Pauli::X, Pauli::Y];
        for (alpha, p) in expected.iter().enumerate() {
            let want = p.matrix().scale_real(FRAC_1_SQRT_2);
            assert!(b.member(alpha).unwrap().max_abs_diff(&want).unwrap() < 1e-15);
        }
        assert_eq!(
            b,
            BellBasis::generate_from_seed(&phi_plus(), Tolerance::default()).unwrap()
        );
    }

    #[test]
    fn standard_n2_is_product_of_bell_states() {
        let b = BellBasis::standard(2).unwrap();
        let b1 = BellBasis::standard(1).unwrap();
        assert_eq!(b.len(), 16);
        for a1 in 0..4 {
            for a2 in 0..4 {
                let want = b1.member(a1).unwrap().kron(b1.member(a2).unwrap());
                let got = b.member(4 * a1 + a2).unwrap();
                assert!(got.max_abs_diff(&want).unwrap() < 1e-15);
            }
        }
    }

    #[test]
    fn separable_seed_rejected() {
        let err = BellBasis::generate_from_seed(&zero_state(2).unwrap(), Tolerance::default())
            .unwrap_err();
        match err {
            QtelError::Validation { deviation, .. } => assert!((deviation - 0.5).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn completeness_and_duplicates() {
        let b = BellBasis::standard(1).unwrap();
        let chk = b.verify_completeness(Tolerance::default());
        assert!(chk.holds && chk.max_deviation < 1e-15);

        let dup = b.member(0).unwrap().clone();
        let broken = b.with_member_unchecked(1, dup);
        assert!(!broken.verify_completeness(Tolerance::default()).holds);
        assert!(
            BellBasis::from_members(1, broken.members().to_vec(), Tolerance::default()).is_err()
        );
    }

    #[test]
    fn maximal_members() {
        for n in 1..=3 {
            let b = BellBasis::standard(n).unwrap();
            for alpha in 0..b.len() {
                assert!(
                    b.is_maximal_member(alpha, Tolerance::default())
                        .unwrap()
                        .holds
                );
            }
            assert!(b.is_maximal_member(b.len(), Tolerance::default()).is_err());
        }
        let separable = zero_state(2).unwrap().to_matrix(1).unwrap();
        let b = BellBasis::standard(1)
            .unwrap()
            .with_member_unchecked(0, separable);
        assert!(!b.is_maximal_member(0, Tolerance::default()).unwrap().holds);
    }

    #[test]
    fn raw_constructor_accepts_valid_family() {
        let b = BellBasis::standard(2).unwrap();
        let again = BellBasis::from_members(2, b.members().to_vec(), Tolerance::default()).unwrap();
        assert_eq!(again, b);
        assert!(
            BellBasis::from_members(2, b.members()[..15].to_vec(), Tolerance::default()).is_err()
        );
    }
}
