//! Teleportation of N-qubit states over 2N-qubit pure channels.
//!
//! Qubits are big-endian: qubit 1 is the most significant index bit. A
//! channel's matrix `E` is the row-major reshape of its amplitudes, rows on
//! the first `n` qubits. The channel is perfect iff `E†E = 2⁻ⁿ·1`.

pub mod bell;
pub mod channel;
pub mod error;
pub mod io;
pub mod magic;
pub mod matrix;
pub mod pauli;
pub mod random;
pub mod teleport;

pub use bell::BellBasis;
pub use channel::{concurrence_2q, Channel};
pub use error::{QtelError, Result};
pub use matrix::{ComplexMatrix, ScaledIdentityCheck, StateVector, Tolerance, C64};
pub use pauli::{Pauli, PauliString, QuaternaryIndex};
pub use teleport::{Mode, ProtocolRun};
