//! Symplectic representation of N-qubit Pauli strings.
//!
//! A string is stored as an X mask, a Z mask and a power of `i`. Bit
//! `n − r` of each mask belongs to qubit `r` (1-based), which lines the
//! masks up with big-endian basis indices: the X mask is exactly the set of
//! index bits the string flips. With `k = popcount(x & z)` the operator is
//!
//! ```text
//! P = i^(phase_power + k) · X^x · Z^z
//! ```
//!
//! so phase 0 with `x & z` set on a qubit means a hermitian `Y` there.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QtelError, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};

/// Largest register the bitmask representation supports.
pub const MAX_QUBITS: usize = 32;

/// Largest register for which exhaustive family checks are allowed.
pub const MAX_EXHAUSTIVE_QUBITS: usize = 3;

/// Single-qubit factor of a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    Z,
    X,
    Y,
}

impl Pauli {
    /// Quaternary digit: 0, 1, 2, 3 select I, Z, X, Y.
    pub fn from_digit(d: u8) -> Option<Pauli> {
        match d {
            0 => Some(Pauli::I),
            1 => Some(Pauli::Z),
            2 => Some(Pauli::X),
            3 => Some(Pauli::Y),
            _ => None,
        }
    }

    pub fn digit(self) -> u8 {
        match self {
            Pauli::I => 0,
            Pauli::Z => 1,
            Pauli::X => 2,
            Pauli::Y => 3,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::Z => (false, true),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (false, true) => Pauli::Z,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::Z => 'Z',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::Z => ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]),
            Pauli::X => ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]),
            Pauli::Y => {
                ComplexMatrix::from_rows(&[[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]])
            }
        }
    }
}

/// Decimal index `α < 4^n` together with its base-4 digits `α_1 … α_n`,
/// most significant first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuaternaryIndex {
    alpha: usize,
    n: usize,
}

impl QuaternaryIndex {
    pub fn new(alpha: usize, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(QtelError::Domain(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n}"
            )));
        }
        let bound = 1u128 << (2 * n);
        if alpha as u128 >= bound {
            return Err(QtelError::Domain(format!(
                "index {alpha} out of range for {n} qubits (must be < 4^{n})"
            )));
        }
        Ok(Self { alpha, n })
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        let mut alpha = 0usize;
        for &d in digits {
            if d > 3 {
                return Err(QtelError::Domain(format!("quaternary digit {d} > 3")));
            }
            alpha = alpha * 4 + d as usize;
        }
        Self::new(alpha, digits.len())
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn digits(&self) -> Vec<u8> {
        (0..self.n)
            .map(|j| ((self.alpha >> (2 * (self.n - 1 - j))) & 3) as u8)
            .collect()
    }
}

/// N-qubit Pauli operator with an explicit power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x_bits: u64,
    z_bits: u64,
    phase_power: u8,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::from_masks(n_qubits, 0, 0, 0)
    }

    pub fn from_masks(n_qubits: usize, x_bits: u64, z_bits: u64, phase_power: u8) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QtelError::Domain(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let mask = (1u64 << n_qubits) - 1;
        if x_bits & !mask != 0 || z_bits & !mask != 0 {
            return Err(QtelError::Domain(format!(
                "bitmasks x={x_bits:#b} z={z_bits:#b} exceed {n_qubits} qubits"
            )));
        }
        Ok(Self {
            n_qubits,
            x_bits,
            z_bits,
            phase_power: phase_power % 4,
        })
    }

    /// Tensor product of single-qubit factors, qubit 1 first.
    pub fn from_factors(factors: &[Pauli]) -> Result<Self> {
        let n = factors.len();
        let (mut x, mut z) = (0u64, 0u64);
        for (r, f) in factors.iter().enumerate() {
            let (fx, fz) = f.bits();
            let bit = 1u64 << (n - 1 - r);
            if fx {
                x |= bit;
            }
            if fz {
                z |= bit;
            }
        }
        Self::from_masks(n, x, z, 0)
    }

    pub fn from_quaternary(index: QuaternaryIndex) -> Self {
        let factors: Vec<Pauli> = index
            .digits()
            .into_iter()
            .map(|d| Pauli::from_digit(d).expect("digit < 4"))
            .collect();
        Self::from_factors(&factors).expect("qubit count validated by QuaternaryIndex")
    }

    /// Phase-free string whose qubit-`r` factor is selected by digit `α_r`
    /// (0, 1, 2, 3 → I, Z, X, Y).
    pub fn from_alpha(alpha: usize, n_qubits: usize) -> Result<Self> {
        Ok(Self::from_quaternary(QuaternaryIndex::new(
            alpha, n_qubits,
        )?))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_bits(&self) -> u64 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u64 {
        self.z_bits
    }

    pub fn phase_power(&self) -> u8 {
        self.phase_power
    }

    pub fn with_phase(self, phase_power: u8) -> Self {
        Self {
            phase_power: phase_power % 4,
            ..self
        }
    }

    /// Same operator content with the phase dropped.
    pub fn unsigned(self) -> Self {
        self.with_phase(0)
    }

    pub fn factor(&self, qubit: usize) -> Pauli {
        let bit = 1u64 << (self.n_qubits - 1 - qubit);
        Pauli::from_bits(self.x_bits & bit != 0, self.z_bits & bit != 0)
    }

    pub fn factors(&self) -> Vec<Pauli> {
        (0..self.n_qubits).map(|q| self.factor(q)).collect()
    }

    pub fn quaternary_index(&self) -> QuaternaryIndex {
        let digits: Vec<u8> = self.factors().into_iter().map(Pauli::digit).collect();
        QuaternaryIndex::from_digits(&digits).expect("valid digits")
    }

    pub fn is_identity(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    /// Hermitian exactly when the overall scalar is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase_power.is_multiple_of(2)
    }

    pub fn weight(&self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    fn check_same_size(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(QtelError::shape(
                op,
                format!("{} vs {} qubits", self.n_qubits, other.n_qubits),
            ));
        }
        Ok(())
    }

    /// Operator product `self · other` with exact phase.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_same_size(other, "product")?;
        let x = self.x_bits ^ other.x_bits;
        let z = self.z_bits ^ other.z_bits;
        // Moving Z^z1 past X^x2 costs (-1)^|z1 & x2|; the Y-count terms convert
        // between the i^(p+|x&z|) normal form of each factor and the result.
        let own_y =
            (self.x_bits & self.z_bits).count_ones() + (other.x_bits & other.z_bits).count_ones();
        let swap = 2 * (self.z_bits & other.x_bits).count_ones();
        let result_y = (x & z).count_ones();
        let phase = (self.phase_power as u32 + other.phase_power as u32 + own_y + swap + 4 * 64
            - result_y)
            % 4;
        Self::from_masks(self.n_qubits, x, z, phase as u8)
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_same_size(other, "commutes")?;
        let parity =
            (self.x_bits & other.z_bits).count_ones() + (self.z_bits & other.x_bits).count_ones();
        Ok(parity.is_multiple_of(2))
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = ComplexMatrix::zeros(dim, dim);
        let base = i_power(self.phase_power as u32 + (self.x_bits & self.z_bits).count_ones());
        let x = self.x_bits as usize;
        let z = self.z_bits as usize;
        for col in 0..dim {
            let sign = if (col & z).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            m[(col ^ x, col)] = base * sign;
        }
        m
    }

    /// Tensor-product rendering such as `Y⊗I`, with any phase prefix.
    pub fn tensor_label(&self) -> String {
        let body: Vec<String> = self
            .factors()
            .iter()
            .map(|f| f.letter().to_string())
            .collect();
        format!("{}{}", phase_prefix(self.phase_power), body.join("⊗"))
    }
}

/// Dense matrix of a Pauli string.
pub fn matrix_of(p: &PauliString) -> ComplexMatrix {
    p.matrix()
}

pub fn i_power(k: u32) -> C64 {
    match k % 4 {
        0 => ONE,
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn phase_prefix(phase: u8) -> &'static str {
    match phase % 4 {
        0 => "",
        1 => "i·",
        2 => "-",
        _ => "-i·",
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", phase_prefix(self.phase_power))?;
        for p in self.factors() {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QtelError;

    /// Accepts an optional phase (`+`, `-`, `i`, `+i`, `-i`, optionally
    /// followed by `·` or `*`) and letters from `IXYZ`, optionally separated
    /// by `⊗`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (sign, rest) = match s.strip_prefix('-') {
            Some(r) => (2u8, r),
            None => (0u8, s.strip_prefix('+').unwrap_or(s)),
        };
        let (imag, rest) = match rest.strip_prefix('i') {
            Some(r) => (1u8, r),
            None => (0u8, rest),
        };
        let rest = rest
            .strip_prefix('·')
            .or_else(|| rest.strip_prefix('*'))
            .unwrap_or(rest);
        let mut factors = Vec::new();
        for ch in rest.chars() {
            match ch {
                'I' => factors.push(Pauli::I),
                'X' => factors.push(Pauli::X),
                'Y' => factors.push(Pauli::Y),
                'Z' => factors.push(Pauli::Z),
                '⊗' => {}
                other => {
                    return Err(QtelError::Parse(format!(
                        "unexpected character {other:?} in Pauli string {s:?}"
                    )))
                }
            }
        }
        if factors.is_empty() {
            return Err(QtelError::Parse(format!("empty Pauli string {s:?}")));
        }
        Ok(PauliString::from_factors(&factors)?.with_phase(sign + imag))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Every phase-free string on `n` qubits, ordered by quaternary index.
pub fn all_strings(n: usize) -> Result<Vec<PauliString>> {
    if n == 0 || n > MAX_EXHAUSTIVE_QUBITS {
        return Err(QtelError::Resource(format!(
            "exhaustive enumeration supports 1..={MAX_EXHAUSTIVE_QUBITS} qubits, got {n}"
        )));
    }
    (0..1usize << (2 * n))
        .map(|alpha| PauliString::from_alpha(alpha, n))
        .collect()
}

/// One row of a [`FamilyReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub counterexample: Option<String>,
}

/// Exhaustive check of the algebraic properties of the phase-free family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub n_qubits: usize,
    pub properties: Vec<PropertyCheck>,
    /// For each non-identity string, how many other non-identity strings it
    /// anticommutes with.
    pub anticommuting_degrees: Vec<usize>,
    /// Whether every pair of distinct non-identity strings anticommutes.
    pub all_nonidentity_anticommute: bool,
}

impl FamilyReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }
}

fn first_failure<T>(
    items: impl IntoIterator<Item = T>,
    bad: impl Fn(&T) -> Option<String>,
) -> Option<String> {
    items.into_iter().find_map(|t| bad(&t))
}

fn vectorize_columns(members: &[ComplexMatrix]) -> ComplexMatrix {
    let rows = members[0].entries().len();
    let mut out = ComplexMatrix::zeros(rows, members.len());
    for (c, m) in members.iter().enumerate() {
        for (r, &v) in m.entries().iter().enumerate() {
            out[(r, c)] = v;
        }
    }
    out
}

/// Checks, over every string on `n ≤ 3` qubits, that squares are the
/// identity, elements are hermitian, products close up to `±1, ±i`, pairs
/// commute or anticommute, every non-identity element has an anticommuting
/// partner, traces vanish off the identity, the family is linearly
/// independent, and it spans all `2^n × 2^n` matrices.
pub fn family_property_report(n: usize) -> Result<FamilyReport> {
    let family = all_strings(n)?;
    let mats: Vec<ComplexMatrix> = family.iter().map(PauliString::matrix).collect();
    let dim = 1usize << n;
    let id = ComplexMatrix::identity(dim);
    let exact = 1e-12;
    let idx: Vec<usize> = (0..family.len()).collect();
    let pairs: Vec<(usize, usize)> = idx
        .iter()
        .flat_map(|&a| idx.iter().map(move |&b| (a, b)))
        .collect();

    let squares = first_failure(&idx, |&&a| {
        let sq = mats[a].matmul(&mats[a]).ok()?;
        (sq.max_abs_diff(&id).ok()? > exact || !family[a].product(&family[a]).ok()?.is_identity())
            .then(|| format!("{}² ≠ 1", family[a]))
    });

    let hermitian = first_failure(&idx, |&&a| {
        (mats[a].max_abs_diff(&mats[a].dagger()).ok()? > exact || !family[a].is_hermitian())
            .then(|| format!("{} not hermitian", family[a]))
    });

    let closure = first_failure(&pairs, |&&(a, b)| {
        let dense = mats[a].matmul(&mats[b]).ok()?;
        let sym = family[a].product(&family[b]).ok()?;
        let member = sym.unsigned();
        let in_family = family.contains(&member);
        let phase_ok = dense.max_abs_diff(&sym.matrix()).ok()? <= exact;
        (!in_family || !phase_ok)
            .then(|| format!("{}·{} not ±1/±i times a member", family[a], family[b]))
    });

    let dichotomy = first_failure(&pairs, |&&(a, b)| {
        let ab = mats[a].matmul(&mats[b]).ok()?;
        let ba = mats[b].matmul(&mats[a]).ok()?;
        let comm = ab.sub(&ba).ok()?.frobenius_norm_sqr().sqrt();
        let anti = ab.add(&ba).ok()?.frobenius_norm_sqr().sqrt();
        let symbolic = family[a].commutes(&family[b]).ok()?;
        let ok = if symbolic {
            comm <= exact
        } else {
            anti <= exact
        };
        (!ok).then(|| {
            format!(
                "{} and {} neither commute nor anticommute",
                family[a], family[b]
            )
        })
    });

    let degrees: Vec<usize> = family[1..]
        .iter()
        .map(|p| {
            family[1..]
                .iter()
                .filter(|q| !p.commutes(q).expect("same size"))
                .count()
        })
        .collect();

    let partner = first_failure(1..family.len(), |&a| {
        (degrees[a - 1] == 0).then(|| format!("{} has no anticommuting partner", family[a]))
    });

    let traceless = first_failure(1..family.len(), |&a| {
        let t = mats[a].trace().ok()?;
        (t.norm() > exact).then(|| format!("Tr({}) = {t}", family[a]))
    });

    let full = 1usize << (2 * n);
    let mut gram = ComplexMatrix::zeros(full, full);
    for &(a, b) in &pairs {
        gram[(a, b)] = mats[a].frobenius_inner(&mats[b])?;
    }
    let gram_rank = gram.rank(1e-9);
    let independent = (gram_rank != full).then(|| format!("Gram matrix rank {gram_rank} < {full}"));

    let span_rank = vectorize_columns(&mats).rank(1e-9);
    let spanning = (span_rank != dim * dim)
        .then(|| format!("family spans dimension {span_rank}, need {}", dim * dim));

    let checks = [
        (1, "square is identity", squares),
        (2, "hermitian", hermitian),
        (3, "closed under products up to ±1, ±i", closure),
        (4, "commute or anticommute", dichotomy),
        (5, "anticommuting partner exists", partner),
        (6, "traceless off identity", traceless),
        (7, "linearly independent", independent),
        (8, "spans all matrices", spanning),
    ];
    let properties = checks
        .into_iter()
        .map(|(id, name, counterexample)| PropertyCheck {
            id,
            name,
            passed: counterexample.is_none(),
            counterexample,
        })
        .collect();

    let nonid = family.len() - 1;
    Ok(FamilyReport {
        n_qubits: n,
        properties,
        all_nonidentity_anticommute: degrees.iter().all(|&d| d == nonid - 1),
        anticommuting_degrees: degrees,
    })
}
