//! Dense complex vectors and matrices sized for a few qubits.
//!
//! Basis index `i` of an `n`-qubit register encodes the bits `i_1 … i_n`
//! big-endian: qubit 1 is the most significant bit. Kronecker products put
//! the left factor on the more significant qubits, so `kron(a, b)` acts with
//! `a` on the leading qubits and `b` on the trailing ones.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{QtelError, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Absolute tolerance used by every approximate comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    abs_eps: f64,
}

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(abs_eps: f64) -> Result<Self> {
        if abs_eps.is_finite() && abs_eps > 0.0 {
            Ok(Self { abs_eps })
        } else {
            Err(QtelError::Domain(format!(
                "tolerance must be a positive finite number, got {abs_eps}"
            )))
        }
    }

    pub fn eps(&self) -> f64 {
        self.abs_eps
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_eps: self.abs_eps * factor,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_eps: Self::DEFAULT_EPS,
        }
    }
}

/// Outcome of comparing a square matrix against `s·1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledIdentityCheck {
    pub holds: bool,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(QtelError::shape(
                "from_row_major",
                format!(
                    "{rows}x{cols} needs {} entries, got {}",
                    rows * cols,
                    entries.len()
                ),
            ));
        }
        if let Some(k) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(QtelError::Domain(format!("matrix entry {k} is not finite")));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged rows");
            entries.extend_from_slice(row.as_ref());
        }
        Self {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(QtelError::shape(
                "matmul",
                format!(
                    "{}x{} times {}x{}",
                    self.rows, self.cols, rhs.rows, rhs.cols
                ),
            ));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(QtelError::shape(
                "apply",
                format!(
                    "{}x{} on vector of length {}",
                    self.rows,
                    self.cols,
                    v.len()
                ),
            ));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|k| self[(i, k)] * v[k]).sum())
            .collect())
    }

    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> ComplexMatrix {
        self.map(|z| z.conj())
    }

    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(QtelError::shape(
                "trace",
                format!("{}x{} is not square", self.rows, self.cols),
            ));
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.map(|z| z * s)
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        rhs: &ComplexMatrix,
        op: &'static str,
        f: impl Fn(C64, C64) -> C64,
    ) -> Result<ComplexMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(QtelError::shape(
                op,
                format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            ));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Largest entrywise modulus of `self − rhs`.
    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> Result<f64> {
        Ok(self
            .sub(rhs)?
            .entries
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    /// Frobenius inner product `Tr(self† rhs)`.
    pub fn frobenius_inner(&self, rhs: &ComplexMatrix) -> Result<C64> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(QtelError::shape(
                "frobenius_inner",
                format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            ));
        }
        Ok(self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Compares against `s·1` entrywise; the deviation is reported either way.
    pub fn is_scaled_identity(&self, s: f64, tol: Tolerance) -> Result<ScaledIdentityCheck> {
        if !self.is_square() {
            return Err(QtelError::shape(
                "is_scaled_identity",
                format!("{}x{} is not square", self.rows, self.cols),
            ));
        }
        let mut max_deviation: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let target = if i == j { C64::new(s, 0.0) } else { ZERO };
                max_deviation = max_deviation.max((self[(i, j)] - target).norm());
            }
        }
        Ok(ScaledIdentityCheck {
            holds: max_deviation <= tol.eps(),
            max_deviation,
        })
    }

    /// `self†·self` against the identity.
    pub fn unitarity(&self, tol: Tolerance) -> Result<ScaledIdentityCheck> {
        self.dagger().matmul(self)?.is_scaled_identity(1.0, tol)
    }

    /// Gauss–Jordan inverse with partial pivoting. Returns `None` when a pivot
    /// falls below `pivot_eps`.
    pub fn inverse(&self, pivot_eps: f64) -> Result<Option<ComplexMatrix>> {
        if !self.is_square() {
            return Err(QtelError::shape(
                "inverse",
                format!("{}x{} is not square", self.rows, self.cols),
            ));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = ComplexMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[(p, col)].norm().total_cmp(&a[(q, col)].norm()))
                .expect("non-empty range");
            if a[(pivot, col)].norm() <= pivot_eps {
                return Ok(None);
            }
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let ac = a[(col, j)];
                    let ic = inv[(col, j)];
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok(Some(inv))
    }

    /// Numerical rank by row reduction; entries at or below `eps` count as zero.
    pub fn rank(&self, eps: f64) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let pivot = (rank..self.rows)
                .max_by(|&p, &q| a[(p, col)].norm().total_cmp(&a[(q, col)].norm()))
                .expect("non-empty range");
            if a[(pivot, col)].norm() <= eps {
                continue;
            }
            a.swap_rows(pivot, rank);
            let p = a[(rank, col)];
            for r in rank + 1..self.rows {
                let f = a[(r, col)] / p;
                if f == ZERO {
                    continue;
                }
                for j in col..self.cols {
                    let v = a[(rank, j)];
                    a[(r, j)] -= f * v;
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join("  "))?;
        }
        Ok(())
    }
}

/// Amplitudes of an `n_qubits` pure state, big-endian basis ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Largest register a state vector may describe.
    pub const MAX_QUBITS: usize = 24;

    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > Self::MAX_QUBITS {
            return Err(QtelError::Domain(format!(
                "n_qubits must be in 1..={}, got {n_qubits}",
                Self::MAX_QUBITS
            )));
        }
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(QtelError::shape(
                "StateVector::new",
                format!(
                    "{n_qubits} qubits need {dim} amplitudes, got {}",
                    amplitudes.len()
                ),
            ));
        }
        if let Some(k) = amplitudes
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(QtelError::Domain(format!("amplitude {k} is not finite")));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize
            .checked_shl(n_qubits as u32)
            .ok_or_else(|| QtelError::Domain(format!("{n_qubits} qubits")))?;
        if index >= dim {
            return Err(QtelError::Domain(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self::new(n_qubits, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: Tolerance) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol.eps()
    }

    /// Rescales to unit norm; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return None;
        }
        Some(Self {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|z| z / norm).collect(),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(QtelError::shape(
                "inner",
                format!("{} vs {} qubits", self.n_qubits, other.n_qubits),
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn kron(&self, rhs: &StateVector) -> Result<StateVector> {
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| rhs.amplitudes.iter().map(move |b| a * b))
            .collect();
        StateVector::new(self.n_qubits + rhs.n_qubits, amps)
    }

    pub fn scale(&self, s: C64) -> StateVector {
        StateVector {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|z| z * s).collect(),
        }
    }

    pub fn apply(&self, op: &ComplexMatrix) -> Result<StateVector> {
        StateVector::new(self.n_qubits, op.apply(&self.amplitudes)?)
    }

    /// Reorders qubits: qubit `r` of the result is qubit `order[r]` of `self`
    /// (both 0-based, qubit 0 most significant).
    pub fn permute_qubits(&self, order: &[usize]) -> Result<StateVector> {
        let n = self.n_qubits;
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&q| q >= n || std::mem::replace(&mut seen[q], true))
        {
            return Err(QtelError::Domain(format!(
                "{order:?} is not a permutation of 0..{n}"
            )));
        }
        let mut out = vec![ZERO; self.dim()];
        for (new_index, slot) in out.iter_mut().enumerate() {
            let mut old_index = 0usize;
            for (r, &src) in order.iter().enumerate() {
                let bit = (new_index >> (n - 1 - r)) & 1;
                old_index |= bit << (n - 1 - src);
            }
            *slot = self.amplitudes[old_index];
        }
        StateVector::new(n, out)
    }

    /// Row-major reshape into a `2^row_qubits × 2^(n − row_qubits)` matrix:
    /// the leading `row_qubits` qubits index rows.
    pub fn to_matrix(&self, row_qubits: usize) -> Result<ComplexMatrix> {
        if row_qubits > self.n_qubits {
            return Err(QtelError::shape(
                "to_matrix",
                format!("{row_qubits} row qubits of a {}-qubit state", self.n_qubits),
            ));
        }
        let rows = 1usize << row_qubits;
        let cols = 1usize << (self.n_qubits - row_qubits);
        ComplexMatrix::from_row_major(rows, cols, self.amplitudes.clone())
    }

    /// Inverse of [`StateVector::to_matrix`]; both dimensions must be powers of two.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<StateVector> {
        let (r, c) = (m.rows(), m.cols());
        if !r.is_power_of_two() || !c.is_power_of_two() || r * c < 2 {
            return Err(QtelError::shape(
                "from_matrix",
                format!("{r}x{c} is not a qubit-register shape"),
            ));
        }
        let n = (r.trailing_zeros() + c.trailing_zeros()) as usize;
        StateVector::new(n, m.entries().to_vec())
    }
}
