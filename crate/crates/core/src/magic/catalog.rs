//! Named two-qubit catalog: the sixteen states `½·reshape(m)` for the
//! two-qubit Pauli family, checked against reference amplitude lists,
//! and a reconciliation of listed anticommuting sets against enumeration.
//!
//! Naming: `I`, `F`, `G`, `H` are `1`, `Z`, `X`, `Y` on qubit 1 (identity on
//! qubit 2); `A_k`, `B_k`, `C_k`, `D_k` put `X`, `Y`, `Z` (`k = 1, 2, 3`) on
//! qubit 2 next to `1`, `Z`, `X`, `Y` on qubit 1.

use serde::Serialize;

use super::cliques::{cliques_of_size, maximal_anticommuting_sets, AnticommGraph};
use super::partial_basis_from_set;
use crate::error::{QtelError, Result};
use crate::matrix::{StateVector, C64, ZERO};
use crate::pauli::{Pauli, PauliString};

pub const CATALOG_NAMES: [&str; 16] = [
    "I", "A1", "A2", "A3", "F", "B1", "B2", "B3", "G", "C1", "C2", "C3", "H", "D1", "D2", "D3",
];

/// Two-qubit string for a catalog name.
pub fn resolve_catalog_name(name: &str) -> Option<PauliString> {
    let first = |c: char| match c {
        'A' => Some(Pauli::I),
        'B' => Some(Pauli::Z),
        'C' => Some(Pauli::X),
        'D' => Some(Pauli::Y),
        _ => None,
    };
    let factors = match name {
        "I" => [Pauli::I, Pauli::I],
        "F" => [Pauli::Z, Pauli::I],
        "G" => [Pauli::X, Pauli::I],
        "H" => [Pauli::Y, Pauli::I],
        _ => {
            let mut chars = name.chars();
            let q1 = first(chars.next()?)?;
            let q2 = match chars.next()? {
                '1' => Pauli::X,
                '2' => Pauli::Y,
                '3' => Pauli::Z,
                _ => return None,
            };
            if chars.next().is_some() {
                return None;
            }
            [q1, q2]
        }
    };
    PauliString::from_factors(&factors).ok()
}

fn catalog_name(p: &PauliString) -> Option<&'static str> {
    CATALOG_NAMES
        .iter()
        .copied()
        .find(|name| resolve_catalog_name(name).as_ref() == Some(&p.unsigned()))
}

/// Parses a comma- or space-separated set. Tokens may be catalog names
/// (two qubits), quaternary indices on `n` qubits, or Pauli strings.
pub fn resolve_set(spec: &str, n: usize) -> Result<Vec<PauliString>> {
    let tokens: Vec<&str> = spec
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect();
    if tokens.is_empty() {
        return Err(QtelError::Parse("empty set".into()));
    }
    tokens
        .into_iter()
        .map(|t| {
            if let Some(p) = resolve_catalog_name(t) {
                if n != 2 {
                    return Err(QtelError::Parse(format!("catalog name {t} needs n = 2")));
                }
                Ok(p)
            } else if let Ok(alpha) = t.parse::<usize>() {
                PauliString::from_alpha(alpha, n)
            } else {
                let p: PauliString = t.parse()?;
                if p.n_qubits() != n {
                    return Err(QtelError::Parse(format!(
                        "{t} has {} qubits, expected {n}",
                        p.n_qubits()
                    )));
                }
                Ok(p)
            }
        })
        .collect()
}

/// Reference amplitudes: prefactor times signed kets.
struct Listed {
    name: &'static str,
    prefactor: C64,
    kets: &'static [(f64, &'static str)],
}

const HALF: C64 = C64::new(0.5, 0.0);
const MINUS_HALF_I: C64 = C64::new(0.0, -0.5);

const LISTED_STATES: [Listed; 16] = [
    Listed {
        name: "I",
        prefactor: HALF,
        kets: &[(1.0, "0000"), (1.0, "0101"), (1.0, "1010"), (1.0, "1111")],
    },
    Listed {
        name: "F",
        prefactor: HALF,
        kets: &[(1.0, "0000"), (1.0, "0101"), (-1.0, "1010"), (-1.0, "1111")],
    },
    Listed {
        name: "G",
        prefactor: HALF,
        kets: &[(1.0, "0010"), (1.0, "0111"), (1.0, "1000"), (1.0, "1101")],
    },
    Listed {
        name: "H",
        prefactor: MINUS_HALF_I,
        kets: &[(1.0, "0010"), (1.0, "0111"), (-1.0, "1000"), (-1.0, "1101")],
    },
    Listed {
        name: "A1",
        prefactor: HALF,
        kets: &[(1.0, "0001"), (1.0, "0100"), (1.0, "1011"), (1.0, "1110")],
    },
    Listed {
        name: "A2",
        prefactor: MINUS_HALF_I,
        kets: &[(1.0, "0001"), (-1.0, "0100"), (1.0, "1011"), (-1.0, "1110")],
    },
    Listed {
        name: "A3",
        prefactor: HALF,
        kets: &[(1.0, "0000"), (-1.0, "0101"), (1.0, "1010"), (-1.0, "1111")],
    },
    Listed {
        name: "B1",
        prefactor: HALF,
        kets: &[(1.0, "0001"), (1.0, "0100"), (-1.0, "1011"), (-1.0, "1110")],
    },
    Listed {
        name: "B2",
        prefactor: MINUS_HALF_I,
        kets: &[(1.0, "0001"), (-1.0, "0100"), (-1.0, "1011"), (1.0, "1110")],
    },
    Listed {
        name: "B3",
        prefactor: HALF,
        kets: &[(1.0, "0000"), (-1.0, "0101"), (-1.0, "1010"), (1.0, "1111")],
    },
    Listed {
        name: "C1",
        prefactor: HALF,
        kets: &[(1.0, "0011"), (1.0, "0110"), (1.0, "1001"), (1.0, "1100")],
    },
    Listed {
        name: "C2",
        prefactor: MINUS_HALF_I,
        kets: &[(1.0, "0011"), (-1.0, "0110"), (1.0, "1001"), (-1.0, "1100")],
    },
    Listed {
        name: "C3",
        prefactor: HALF,
        kets: &[(1.0, "0010"), (-1.0, "0111"), (1.0, "1000"), (-1.0, "1101")],
    },
    Listed {
        name: "D1",
        prefactor: MINUS_HALF_I,
        kets: &[(1.0, "0111"), (1.0, "0110"), (-1.0, "1001"), (-1.0, "1100")],
    },
    Listed {
        name: "D2",
        prefactor: HALF,
        kets: &[(-1.0, "0011"), (1.0, "0110"), (-1.0, "1001"), (1.0, "1100")],
    },
    Listed {
        name: "D3",
        prefactor: MINUS_HALF_I,
        kets: &[(1.0, "0010"), (-1.0, "0111"), (-1.0, "1000"), (1.0, "1101")],
    },
];

fn listed_state(p: &Listed) -> StateVector {
    let mut amps = vec![ZERO; 16];
    for &(sign, ket) in p.kets {
        let idx = usize::from_str_radix(ket, 2).expect("binary ket");
        amps[idx] += p.prefactor * sign;
    }
    StateVector::new(4, amps).expect("sixteen amplitudes")
}

/// Reference maximal sets, as given (including repeated or unknown names).
const LISTED_MAXIMAL_SETS: [&[&str]; 8] = [
    &["F", "G", "D1", "D2", "D2"],
    &["G", "H", "B1", "B2", "B3"],
    &["H", "E", "C1", "C2", "C3"],
    &["A1", "A2", "B3", "C3", "D3"],
    &["A2", "A3", "B1", "C2", "D2"],
    &["A3", "A1", "B2", "C2", "D2"],
    &["E", "G", "H"],
    &["A1", "A2", "A3"],
];

/// Reference partial bases without the common `|I⟩` member.
const LISTED_PARTIAL_BASES: [&[&str]; 8] = [
    &["F", "G", "D1", "D2", "D3"],
    &["G", "H", "B1", "B2", "B3"],
    &["H", "F", "C1", "C2", "C3"],
    &["A1", "A2", "B3", "C3", "D3"],
    &["A2", "A3", "B1", "C1", "D1"],
    &["A2", "A3", "A1", "B2", "C2", "D2"],
    &["F", "G", "H"],
    &["A1", "A2", "A3"],
];

/// Reference quarter bases without the common `|I⟩` member.
const LISTED_QUARTER_BASES: [&[&str]; 6] = [
    &["F", "G", "H"],
    &["A1", "A2", "A3"],
    &["A2", "A3"],
    &["B1", "B2", "B3"],
    &["C1", "C2", "C3"],
    &["D1", "D2", "D3"],
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub pauli: PauliString,
    pub listed: Vec<[f64; 2]>,
    pub constructed: Vec<[f64; 2]>,
    pub max_deviation: f64,
    pub matches: bool,
}

impl CatalogEntry {
    pub fn listed_state(&self) -> StateVector {
        StateVector::new(
            4,
            self.listed
                .iter()
                .map(|&[re, im]| C64::new(re, im))
                .collect(),
        )
        .expect("valid")
    }

    pub fn constructed_state(&self) -> StateVector {
        StateVector::new(
            4,
            self.constructed
                .iter()
                .map(|&[re, im]| C64::new(re, im))
                .collect(),
        )
        .expect("valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    MaximalSet,
    PartialBasis,
    QuarterBasis,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconciliationRow {
    pub kind: SetKind,
    pub listed: Vec<String>,
    /// Nearest enumerated set (maximal clique, or 3-clique for quarter bases).
    pub nearest: Vec<String>,
    pub overlap: usize,
    pub exact_match: bool,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarterBasisSummary {
    /// All sets of three mutually anticommuting strings.
    pub total: usize,
    /// Largest number of quarter bases that pairwise share only `|I⟩`.
    pub max_sharing_only_identity: usize,
    /// Lexicographically first family attaining that maximum.
    pub example_family: Vec<Vec<String>>,
    /// Listed families that are well formed and share only `|I⟩` with
    /// every other well-formed listed family.
    pub listed_valid_disjoint: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    /// Names whose listed amplitudes disagree with the construction.
    pub state_typos: Vec<String>,
    /// Dimension-6 partial bases from enumeration, identity member implied.
    pub maximal_partial_bases: Vec<Vec<String>>,
    /// Maximal sets of size three.
    pub maximal_triples: Vec<Vec<String>>,
    pub max_partial_dimension: usize,
    pub quarter_bases: QuarterBasisSummary,
    pub reconciliation: Vec<ReconciliationRow>,
}

impl Catalog {
    pub fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn flagged_rows(&self) -> impl Iterator<Item = &ReconciliationRow> {
        self.reconciliation.iter().filter(|r| !r.flags.is_empty())
    }
}

fn to_pairs(s: &StateVector) -> Vec<[f64; 2]> {
    s.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

fn names_of(graph: &AnticommGraph, set: &[usize]) -> Vec<String> {
    set.iter()
        .map(|&v| {
            catalog_name(&graph.vertices()[v])
                .expect("two-qubit vertex")
                .to_string()
        })
        .collect()
}

fn reconcile(
    graph: &AnticommGraph,
    kind: SetKind,
    listed: &[&str],
    candidates: &[Vec<usize>],
    max_size: usize,
) -> ReconciliationRow {
    let mut flags = Vec::new();
    let mut vertices: Vec<usize> = Vec::new();
    for (k, name) in listed.iter().enumerate() {
        if listed[..k].contains(name) {
            flags.push(format!("{name} listed more than once"));
            continue;
        }
        match resolve_catalog_name(name).and_then(|p| graph.vertex_of(&p)) {
            Some(v) => vertices.push(v),
            None => flags.push(format!("{name} is not a defined state")),
        }
    }
    vertices.sort_unstable();
    for (i, &a) in vertices.iter().enumerate() {
        for &b in &vertices[i + 1..] {
            if !graph.adjacent(a, b) {
                let pair = names_of(graph, &[a, b]);
                flags.push(format!("{} and {} commute", pair[0], pair[1]));
            }
        }
    }
    match kind {
        SetKind::QuarterBasis => {
            if listed.len() != 3 {
                flags.push(format!(
                    "{} states listed, a quarter basis has 4",
                    listed.len() + 1
                ));
            }
        }
        SetKind::MaximalSet | SetKind::PartialBasis => {
            if listed.len() > max_size {
                flags.push(format!(
                    "{} strings listed, the maximum is {max_size}",
                    listed.len()
                ));
            }
            if flags.is_empty() && !graph.is_maximal_clique(&vertices) {
                flags.push("set can be extended".into());
            }
        }
    }

    let (nearest, overlap) = candidates
        .iter()
        .map(|c| (c, c.iter().filter(|v| vertices.contains(v)).count()))
        .max_by(|(a, oa), (b, ob)| {
            oa.cmp(ob)
                .then_with(|| {
                    b.len()
                        .abs_diff(vertices.len())
                        .cmp(&a.len().abs_diff(vertices.len()))
                })
                .then_with(|| b.cmp(a))
        })
        .map(|(c, o)| (c.clone(), o))
        .unwrap_or_default();
    let exact_match = flags.is_empty() && nearest == vertices;
    if flags.is_empty() && !exact_match {
        flags.push("does not match any enumerated set".into());
    }
    ReconciliationRow {
        kind,
        listed: listed.iter().map(|s| s.to_string()).collect(),
        nearest: names_of(graph, &nearest),
        overlap,
        exact_match,
        flags,
    }
}

fn max_disjoint_family(triples: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn search(
        triples: &[Vec<usize>],
        start: usize,
        used: u64,
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        for (k, t) in triples.iter().enumerate().skip(start) {
            let mask = t.iter().fold(0u64, |m, &v| m | 1u64 << v);
            if mask & used == 0 {
                current.push(k);
                search(triples, k + 1, used | mask, current, best);
                current.pop();
            }
        }
    }
    let mut best = Vec::new();
    search(triples, 0, 0, &mut Vec::new(), &mut best);
    best.into_iter().map(|k| triples[k].clone()).collect()
}

/// Builds the two-qubit catalog and reconciles the listed sets.
pub fn n2_catalog() -> Result<Catalog> {
    let entries = LISTED_STATES
        .iter()
        .map(|p| {
            let pauli = resolve_catalog_name(p.name).expect("catalog name");
            let constructed = StateVector::from_matrix(&pauli.matrix().scale_real(0.5))?;
            let listed = listed_state(p);
            let max_deviation = listed
                .amplitudes()
                .iter()
                .zip(constructed.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            Ok(CatalogEntry {
                name: p.name,
                pauli,
                listed: to_pairs(&listed),
                constructed: to_pairs(&constructed),
                max_deviation,
                matches: max_deviation == 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let state_typos = entries
        .iter()
        .filter(|e| !e.matches)
        .map(|e| e.name.to_string())
        .collect();

    let graph = AnticommGraph::build(2)?;
    let report = maximal_anticommuting_sets(&graph);
    for clique in report.maximum_cliques() {
        let set: Vec<PauliString> = clique.iter().map(|&v| graph.vertices()[v]).collect();
        partial_basis_from_set(&set)?;
    }
    let maximal_partial_bases = report
        .maximum_cliques()
        .map(|c| names_of(&graph, c))
        .collect();
    let maximal_triples = report.of_size(3).map(|c| names_of(&graph, c)).collect();

    let triples = cliques_of_size(&graph, 3);
    let family = max_disjoint_family(&triples);

    let mut reconciliation = Vec::new();
    for listed in LISTED_MAXIMAL_SETS {
        reconciliation.push(reconcile(
            &graph,
            SetKind::MaximalSet,
            listed,
            &report.maximal_cliques,
            report.max_size,
        ));
    }
    for listed in LISTED_PARTIAL_BASES {
        reconciliation.push(reconcile(
            &graph,
            SetKind::PartialBasis,
            listed,
            &report.maximal_cliques,
            report.max_size,
        ));
    }
    let mut quarter_rows: Vec<ReconciliationRow> = LISTED_QUARTER_BASES
        .iter()
        .map(|listed| reconcile(&graph, SetKind::QuarterBasis, listed, &triples, 3))
        .collect();
    let malformed: Vec<bool> = quarter_rows.iter().map(|r| !r.flags.is_empty()).collect();
    for a in 0..quarter_rows.len() {
        for b in 0..quarter_rows.len() {
            // Overlap with a malformed row is reported on that row only.
            if a == b || (malformed[b] && !malformed[a]) {
                continue;
            }
            let shared: Vec<String> = quarter_rows[a]
                .listed
                .iter()
                .filter(|s| quarter_rows[b].listed.contains(s))
                .cloned()
                .collect();
            if !shared.is_empty() {
                let others = quarter_rows[b].listed.join(", ");
                quarter_rows[a]
                    .flags
                    .push(format!("shares {} with {{{others}}}", shared.join(", ")));
                quarter_rows[a].exact_match = false;
            }
        }
    }
    let listed_valid_disjoint = quarter_rows.iter().filter(|r| r.flags.is_empty()).count();
    reconciliation.extend(quarter_rows);

    Ok(Catalog {
        entries,
        state_typos,
        maximal_partial_bases,
        maximal_triples,
        max_partial_dimension: report.max_size + 1,
        quarter_bases: QuarterBasisSummary {
            total: triples.len(),
            max_sharing_only_identity: family.len(),
            example_family: family.iter().map(|t| names_of(&graph, t)).collect(),
            listed_valid_disjoint,
        },
        reconciliation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        assert_eq!(resolve_catalog_name("F").unwrap().to_string(), "ZI");
        assert_eq!(resolve_catalog_name("D2").unwrap().to_string(), "YY");
        assert_eq!(resolve_catalog_name("A3").unwrap().to_string(), "IZ");
        assert!(resolve_catalog_name("E").is_none());
        assert!(resolve_catalog_name("A4").is_none());
        for name in CATALOG_NAMES {
            assert_eq!(
                catalog_name(&resolve_catalog_name(name).unwrap()),
                Some(name)
            );
        }
    }

    #[test]
    fn set_parsing() {
        let s = resolve_set("F, G,D1", 2).unwrap();
        assert_eq!(
            s.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            ["ZI", "XI", "YX"]
        );
        let s = resolve_set("4 8", 2).unwrap();
        assert_eq!(s[0].to_string(), "ZI");
        assert_eq!(resolve_set("ZXY", 3).unwrap()[0].to_string(), "ZXY");
        assert!(resolve_set("F", 3).is_err());
        assert!(resolve_set("", 2).is_err());
        assert!(resolve_set("ZX", 3).is_err());
    }

    #[test]
    fn listed_f_and_d2() {
        let cat = n2_catalog().unwrap();
        let f = cat.entry("F").unwrap().listed_state();
        let mut want = vec![ZERO; 16];
        want[0b0000] = HALF;
        want[0b0101] = HALF;
        want[0b1010] = -HALF;
        want[0b1111] = -HALF;
        assert_eq!(f.amplitudes(), want.as_slice());
        assert!(cat.entry("F").unwrap().matches);

        let d2 = cat.entry("D2").unwrap().listed_state();
        let mut want = vec![ZERO; 16];
        want[0b0011] = -HALF;
        want[0b0110] = HALF;
        want[0b1001] = -HALF;
        want[0b1100] = HALF;
        assert_eq!(d2.amplitudes(), want.as_slice());
    }

    #[test]
    fn state_typos_identified() {
        let cat = n2_catalog().unwrap();
        assert_eq!(cat.state_typos, vec!["D1".to_string(), "D2".to_string()]);
        for e in &cat.entries {
            assert!((e.constructed_state().norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn enumeration_summary() {
        let cat = n2_catalog().unwrap();
        assert_eq!(cat.max_partial_dimension, 6);
        assert_eq!(cat.maximal_partial_bases.len(), 6);
        assert_eq!(cat.maximal_triples.len(), 20);
        assert_eq!(cat.quarter_bases.total, 80);
        assert_eq!(cat.quarter_bases.max_sharing_only_identity, 5);
        assert_eq!(cat.quarter_bases.listed_valid_disjoint, 5);
    }

    #[test]
    fn reconciliation_flags() {
        let cat = n2_catalog().unwrap();
        let row = |kind: SetKind, k: usize| {
            cat.reconciliation
                .iter()
                .filter(|r| r.kind == kind)
                .nth(k)
                .unwrap()
        };
        assert!(row(SetKind::MaximalSet, 0)
            .flags
            .iter()
            .any(|f| f.contains("D2 listed more than once")));
        assert!(row(SetKind::MaximalSet, 1).exact_match);
        assert!(row(SetKind::MaximalSet, 2)
            .flags
            .iter()
            .any(|f| f.contains("E is not a defined state")));
        assert_eq!(
            row(SetKind::MaximalSet, 2).nearest,
            ["F", "C3", "C1", "C2", "H"]
        );
        assert!(row(SetKind::MaximalSet, 4)
            .flags
            .iter()
            .any(|f| f.contains("commute")));
        assert!(row(SetKind::MaximalSet, 7).exact_match);
        assert!(row(SetKind::PartialBasis, 0).exact_match);
        assert!(row(SetKind::PartialBasis, 4).exact_match);
        assert!(row(SetKind::PartialBasis, 5)
            .flags
            .iter()
            .any(|f| f.contains("maximum is 5")));
        assert!(row(SetKind::QuarterBasis, 0).exact_match);
        assert!(row(SetKind::QuarterBasis, 1).exact_match);
        assert!(row(SetKind::QuarterBasis, 2)
            .flags
            .iter()
            .any(|f| f.contains("quarter basis has 4")));
        assert!(row(SetKind::QuarterBasis, 2)
            .flags
            .iter()
            .any(|f| f.contains("shares A2, A3 with {A1, A2, A3}")));
        assert!(row(SetKind::QuarterBasis, 3).exact_match);
    }
}
