//! JSON formats for states, matrices, bases and versioned reports.
//!
//! Complex numbers are `[re, im]` pairs. Matrices are row-major.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::bell::BellBasis;
use crate::error::{QtelError, Result};
use crate::matrix::{ComplexMatrix, StateVector, Tolerance, C64};

pub const SCHEMA: &str = "qtel/1";

fn pairs(z: &[C64]) -> Vec<[f64; 2]> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ComplexMatrix", 3)?;
        st.serialize_field("rows", &self.rows())?;
        st.serialize_field("cols", &self.cols())?;
        st.serialize_field("entries", &pairs(self.entries()))?;
        st.end()
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("StateVector", 2)?;
        st.serialize_field("n_qubits", &self.n_qubits())?;
        st.serialize_field("amplitudes", &pairs(self.amplitudes()))?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateWire {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| QtelError::Parse(format!("{what}: {e}")))
}

fn complexes(entries: &[[f64; 2]], field: &str) -> Result<Vec<C64>> {
    entries
        .iter()
        .enumerate()
        .map(|(k, &[re, im])| {
            if re.is_finite() && im.is_finite() {
                Ok(C64::new(re, im))
            } else {
                Err(QtelError::Parse(format!("{field}[{k}] is not finite")))
            }
        })
        .collect()
}

/// Parses a state file. Errors name the offending field, or the line and
/// column for malformed JSON.
pub fn parse_state(text: &str) -> Result<StateVector> {
    let wire: StateWire = parse_json(text, "state file")?;
    if wire.n_qubits == 0 || wire.n_qubits > StateVector::MAX_QUBITS {
        return Err(QtelError::Parse(format!(
            "field n_qubits: {} outside 1..={}",
            wire.n_qubits,
            StateVector::MAX_QUBITS
        )));
    }
    let want = 1usize << wire.n_qubits;
    if wire.amplitudes.len() != want {
        return Err(QtelError::Parse(format!(
            "field amplitudes: {} entries, n_qubits = {} needs {want}",
            wire.amplitudes.len(),
            wire.n_qubits
        )));
    }
    StateVector::new(wire.n_qubits, complexes(&wire.amplitudes, "amplitudes")?)
}

fn matrix_from_wire(wire: MatrixWire, context: &str) -> Result<ComplexMatrix> {
    if wire.entries.len() != wire.rows * wire.cols {
        return Err(QtelError::Parse(format!(
            "{context}field entries: {} entries for a {}x{} matrix",
            wire.entries.len(),
            wire.rows,
            wire.cols
        )));
    }
    ComplexMatrix::from_row_major(
        wire.rows,
        wire.cols,
        complexes(&wire.entries, &format!("{context}entries"))?,
    )
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    matrix_from_wire(parse_json(text, "matrix file")?, "")
}

/// Parses a basis file and runs the orthonormality and completeness checks.
pub fn parse_basis(text: &str, tol: Tolerance) -> Result<BellBasis> {
    let wires: Vec<MatrixWire> = parse_json(text, "basis file")?;
    let members = wires
        .into_iter()
        .enumerate()
        .map(|(k, w)| matrix_from_wire(w, &format!("member {k}: ")))
        .collect::<Result<Vec<_>>>()?;
    let dim = members.first().map(|m| m.rows()).unwrap_or(0);
    if dim == 0 || !dim.is_power_of_two() {
        return Err(QtelError::Parse(format!(
            "basis members must be 2^n square matrices, got dimension {dim}"
        )));
    }
    BellBasis::from_members(dim.trailing_zeros() as usize, members, tol)
}

pub fn state_to_json(state: &StateVector) -> String {
    serde_json::to_string_pretty(state).expect("state serializes")
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(m).expect("matrix serializes")
}

pub fn basis_to_json(basis: &BellBasis) -> String {
    serde_json::to_string_pretty(basis.members()).expect("basis serializes")
}

/// Top-level report envelope.
#[derive(Debug, Clone, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub schema: &'static str,
    pub command: &'a str,
    pub ok: bool,
    pub data: T,
}

impl<'a, T: Serialize> Report<'a, T> {
    pub fn new(command: &'a str, ok: bool, data: T) -> Self {
        Self {
            schema: SCHEMA,
            command,
            ok,
            data,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Channel;

    #[test]
    fn state_round_trip() {
        let s = Channel::ghz(2).unwrap().state().clone();
        let back = parse_state(&state_to_json(&s)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn random_states_round_trip_bit_exact() {
        for k in 0..50 {
            let s =
                crate::random::random_state(&mut crate::random::seeded_stream(81, k), 3).unwrap();
            assert_eq!(parse_state(&state_to_json(&s)).unwrap(), s);
        }
    }

    #[test]
    fn state_diagnostics() {
        let e = parse_state(r#"{"n_qubits": 1, "amplitudes": [[1,0]]}"#).unwrap_err();
        assert!(e.to_string().contains("field amplitudes"), "{e}");
        let e = parse_state("{\"n_qubits\": 1,\n \"amplitudes\": [[1,0],[0,]]}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = parse_state(r#"{"n_qubit": 1, "amplitudes": []}"#).unwrap_err();
        assert!(e.to_string().contains("n_qubit"), "{e}");
        let e = parse_state(r#"{"n_qubits": 0, "amplitudes": [[1,0]]}"#).unwrap_err();
        assert!(e.to_string().contains("n_qubits"), "{e}");
    }

    #[test]
    fn matrix_and_basis_round_trip() {
        let m = ComplexMatrix::from_rows(&[[C64::new(1.0, 2.0), C64::new(0.0, -1.0)]]);
        assert_eq!(parse_matrix(&matrix_to_json(&m)).unwrap(), m);
        let b = BellBasis::standard(2).unwrap();
        let back = parse_basis(&basis_to_json(&b), Tolerance::default()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn report_envelope() {
        let r = Report::new("demo", true, 3);
        assert!(r.to_json().starts_with("{\n  \"schema\": \"qtel/1\""));
    }
}
