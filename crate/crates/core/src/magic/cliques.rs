//! Anticommutation graph on non-identity Pauli strings and exact maximal
//! clique enumeration.

use serde::Serialize;

use crate::error::{QtelError, Result};
use crate::pauli::{all_strings, PauliString, MAX_EXHAUSTIVE_QUBITS};

/// Vertex `v` is the phase-free string with quaternary index `v + 1`.
/// Adjacency rows are bitsets; at most 63 vertices, so one `u64` per row.
#[derive(Debug, Clone, PartialEq)]
pub struct AnticommGraph {
    n: usize,
    vertices: Vec<PauliString>,
    adjacency: Vec<u64>,
}

impl AnticommGraph {
    pub fn build(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_EXHAUSTIVE_QUBITS {
            return Err(QtelError::Resource(format!(
                "anticommutation graph supports 1..={MAX_EXHAUSTIVE_QUBITS} qubits, got {n}"
            )));
        }
        let vertices: Vec<PauliString> = all_strings(n)?.into_iter().skip(1).collect();
        let mut adjacency = vec![0u64; vertices.len()];
        for (a, pa) in vertices.iter().enumerate() {
            for (b, pb) in vertices.iter().enumerate() {
                if a != b && !pa.commutes(pb)? {
                    adjacency[a] |= 1u64 << b;
                }
            }
        }
        Ok(Self {
            n,
            vertices,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[PauliString] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a] >> b & 1 == 1
    }

    pub fn neighbours(&self, v: usize) -> u64 {
        self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Vertex of a phase-free non-identity string.
    pub fn vertex_of(&self, p: &PauliString) -> Option<usize> {
        if p.n_qubits() != self.n || p.is_identity() {
            return None;
        }
        Some(p.quaternary_index().alpha() - 1)
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| self.adjacent(a, b)))
    }

    /// A clique is maximal when no outside vertex is adjacent to all members.
    pub fn is_maximal_clique(&self, set: &[usize]) -> bool {
        if !self.is_clique(set) {
            return false;
        }
        let common = set
            .iter()
            .fold(self.all_vertices(), |acc, &v| acc & self.adjacency[v]);
        common == 0
    }

    fn all_vertices(&self) -> u64 {
        if self.vertices.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.vertices.len()) - 1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliqueReport {
    pub n: usize,
    /// Vertex indices, each sorted ascending; the list is in lexicographic order.
    pub maximal_cliques: Vec<Vec<usize>>,
    pub max_size: usize,
}

impl CliqueReport {
    pub fn of_size(&self, size: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.maximal_cliques.iter().filter(move |c| c.len() == size)
    }

    pub fn maximum_cliques(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.of_size(self.max_size)
    }

    /// Size histogram as `(size, count)` pairs, ascending by size.
    pub fn size_histogram(&self) -> Vec<(usize, usize)> {
        let mut hist: Vec<(usize, usize)> = Vec::new();
        for c in &self.maximal_cliques {
            match hist.iter_mut().find(|(s, _)| *s == c.len()) {
                Some(entry) => entry.1 += 1,
                None => hist.push((c.len(), 1)),
            }
        }
        hist.sort_unstable();
        hist
    }
}

fn bits(mut set: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            return None;
        }
        let v = set.trailing_zeros() as usize;
        set &= set - 1;
        Some(v)
    })
}

/// Bron–Kerbosch with Tomita pivoting over bitsets.
fn expand(g: &AnticommGraph, r: u64, mut p: u64, mut x: u64, out: &mut Vec<Vec<usize>>) {
    if p == 0 {
        if x == 0 {
            out.push(bits(r).collect());
        }
        return;
    }
    let pivot = bits(p | x)
        .max_by_key(|&u| (p & g.neighbours(u)).count_ones())
        .expect("p ∪ x non-empty");
    for v in bits(p & !g.neighbours(pivot)) {
        let nv = g.neighbours(v);
        expand(g, r | 1u64 << v, p & nv, x & nv, out);
        p &= !(1u64 << v);
        x |= 1u64 << v;
    }
}

/// Every maximal set of mutually anticommuting strings, canonical order.
pub fn maximal_anticommuting_sets(g: &AnticommGraph) -> CliqueReport {
    let mut cliques = Vec::new();
    expand(g, 0, g.all_vertices(), 0, &mut cliques);
    cliques.sort();
    let max_size = cliques.iter().map(Vec::len).max().unwrap_or(0);
    CliqueReport {
        n: g.n(),
        maximal_cliques: cliques,
        max_size,
    }
}

/// Every clique of exactly `size` vertices (not necessarily maximal),
/// lexicographic order.
pub fn cliques_of_size(g: &AnticommGraph, size: usize) -> Vec<Vec<usize>> {
    fn grow(
        g: &AnticommGraph,
        current: &mut Vec<usize>,
        candidates: u64,
        size: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for v in bits(candidates) {
            current.push(v);
            let later = candidates & g.neighbours(v) & !((1u64 << v) | ((1u64 << v) - 1));
            grow(g, current, later, size, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    grow(g, &mut Vec::new(), g.all_vertices(), size, &mut out);
    out
}
