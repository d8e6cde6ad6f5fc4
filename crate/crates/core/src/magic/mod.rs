//! Magic bases and magic partial bases.
//!
//! For mutually anticommuting hermitian strings `M_1 … M_r` the matrices
//! `m̃_0 = 2^{-n/2}·1` and `m̃_l = 2^{-n/2}·i·M_l` give orthonormal 2n-qubit
//! states such that every combination `Σ c_l m̃_l` whose coefficients share a
//! single phase is again a perfect channel: the cross terms reduce to
//! anticommutators and vanish. A full basis of `4^n` such states would need
//! `4^n − 1` mutually anticommuting strings, which only exists for `n = 1`.

mod catalog;
mod cliques;

pub use catalog::{
    n2_catalog, resolve_catalog_name, resolve_set, Catalog, CatalogEntry, QuarterBasisSummary,
    ReconciliationRow, SetKind, CATALOG_NAMES,
};
pub use cliques::{cliques_of_size, maximal_anticommuting_sets, AnticommGraph, CliqueReport};

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use serde::Serialize;

use crate::bell::BellBasis;
use crate::channel::Channel;
use crate::error::{QtelError, Result};
use crate::matrix::{ComplexMatrix, StateVector, Tolerance, C64, I, ZERO};
use crate::pauli::PauliString;
use crate::random::{random_state, seeded_stream};
use crate::teleport::{run_protocol, Mode};

/// The four two-qubit magic states, including their factors of `i`.
pub fn hill_wootters_basis() -> [StateVector; 4] {
    let s = FRAC_1_SQRT_2;
    let r = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    [
        vec![r(s), ZERO, ZERO, r(s)],
        vec![im(s), ZERO, ZERO, im(-s)],
        vec![ZERO, im(s), im(s), ZERO],
        vec![ZERO, r(s), r(-s), ZERO],
    ]
    .map(|amps| StateVector::new(2, amps).expect("four amplitudes"))
}

/// Identity member plus `i·M_l` members built from anticommuting strings.
#[derive(Debug, Clone, PartialEq)]
pub struct MagicPartialBasis {
    n: usize,
    source_set: Vec<PauliString>,
    matrices: Vec<ComplexMatrix>,
    members: Vec<StateVector>,
}

impl MagicPartialBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The strings `M_l`, sorted by quaternary index.
    pub fn source_set(&self) -> &[PauliString] {
        &self.source_set
    }

    /// `m̃_0 … m̃_r`.
    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn members(&self) -> &[StateVector] {
        &self.members
    }

    /// Number of states, `r + 1`.
    pub fn dimension(&self) -> usize {
        self.members.len()
    }

    /// `Σ c_l m̃_l`.
    pub fn combine(&self, coefficients: &[C64]) -> Result<ComplexMatrix> {
        if coefficients.len() != self.matrices.len() {
            return Err(QtelError::shape(
                "MagicPartialBasis::combine",
                format!(
                    "{} coefficients for {} members",
                    coefficients.len(),
                    self.matrices.len()
                ),
            ));
        }
        let dim = 1usize << self.n;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (c, m) in coefficients.iter().zip(&self.matrices) {
            out = out.add(&m.scale(*c))?;
        }
        Ok(out)
    }

    /// Largest entry of `|G − 1|` for the Gram matrix of the member states.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, sa) in self.members.iter().enumerate() {
            for (b, sb) in self.members.iter().enumerate() {
                let g = sa.inner(sb).expect("same size");
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Coefficients `⟨member_l|state⟩` and the norm of what the members miss.
    pub fn expand(&self, state: &StateVector) -> Result<(Vec<C64>, f64)> {
        let coefficients: Vec<C64> = self
            .members
            .iter()
            .map(|m| m.inner(state))
            .collect::<Result<_>>()?;
        let mut residual = state.amplitudes().to_vec();
        for (c, m) in coefficients.iter().zip(&self.members) {
            for (r, a) in residual.iter_mut().zip(m.amplitudes()) {
                *r -= c * a;
            }
        }
        let norm = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Ok((coefficients, norm))
    }
}

fn build_partial_basis(
    set: &[PauliString],
    check_anticommuting: bool,
) -> Result<MagicPartialBasis> {
    let n = set
        .first()
        .map(PauliString::n_qubits)
        .ok_or_else(|| QtelError::Domain("empty set of Pauli strings".into()))?;
    let mut sorted = set.to_vec();
    sorted.sort_by_key(|p| (p.quaternary_index(), p.phase_power()));
    for p in &sorted {
        if p.n_qubits() != n {
            return Err(QtelError::shape(
                "partial_basis_from_set",
                format!("{p} has {} qubits, expected {n}", p.n_qubits()),
            ));
        }
        if p.is_identity() {
            return Err(QtelError::Validation {
                what: format!("{p} is the identity"),
                deviation: 0.0,
            });
        }
        if !p.is_hermitian() {
            return Err(QtelError::Validation {
                what: format!("{p} is not hermitian"),
                deviation: 0.0,
            });
        }
    }
    for (a, pa) in sorted.iter().enumerate() {
        for pb in &sorted[a + 1..] {
            if pa.unsigned() == pb.unsigned() {
                return Err(QtelError::Validation {
                    what: format!("{pa} appears twice"),
                    deviation: 0.0,
                });
            }
            if check_anticommuting && pa.commutes(pb)? {
                return Err(QtelError::Validation {
                    what: format!("{pa} and {pb} commute"),
                    deviation: 2.0,
                });
            }
        }
    }
    let norm = 2f64.powf(-(n as f64) / 2.0);
    let dim = 1usize << n;
    let matrices: Vec<ComplexMatrix> =
        std::iter::once(ComplexMatrix::identity(dim).scale_real(norm))
            .chain(sorted.iter().map(|p| p.matrix().scale(I * norm)))
            .collect();
    let members = matrices
        .iter()
        .map(StateVector::from_matrix)
        .collect::<Result<Vec<_>>>()?;
    Ok(MagicPartialBasis {
        n,
        source_set: sorted,
        matrices,
        members,
    })
}

/// Partial basis from pairwise anticommuting, hermitian, non-identity strings.
pub fn partial_basis_from_set(set: &[PauliString]) -> Result<MagicPartialBasis> {
    build_partial_basis(set, true)
}

/// Same construction without the anticommutation check, for demonstrating
/// what goes wrong when a commuting pair is present.
pub fn partial_basis_from_set_unchecked(set: &[PauliString]) -> Result<MagicPartialBasis> {
    build_partial_basis(set, false)
}

/// How random coefficients are drawn during verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientPhases {
    /// `c_l = |c_l|·e^{iθ}` with one `θ` per draw.
    Global,
    /// An independent phase per coefficient.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialBasisVerification {
    pub dimension: usize,
    pub trials: usize,
    pub seed: u64,
    pub phases: CoefficientPhases,
    /// Largest deviation of `M̃†M̃` from `2^{-n}·1` over all draws.
    pub max_gram_deviation: f64,
    /// Largest `1 − F` seen when teleporting through `M̃`.
    pub max_fidelity_deficit: f64,
    /// Largest deviation of any single member from a perfect channel.
    pub max_member_deviation: f64,
    pub orthonormality_deviation: f64,
    pub failed_trials: usize,
    pub passed: bool,
}

fn draw_coefficients<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    phases: CoefficientPhases,
) -> Vec<C64> {
    let magnitudes: Vec<f64> = (0..count).map(|_| rng.random::<f64>()).collect();
    let norm = magnitudes.iter().map(|m| m * m).sum::<f64>().sqrt();
    let global = rng.random::<f64>() * std::f64::consts::TAU;
    magnitudes
        .into_iter()
        .map(|m| {
            let theta = match phases {
                CoefficientPhases::Global => global,
                CoefficientPhases::Independent => rng.random::<f64>() * std::f64::consts::TAU,
            };
            C64::from_polar(m / norm, theta)
        })
        .collect()
}

/// Draws `trials` random coefficient vectors, checks `M̃†M̃ = 2^{-n}·1` and
/// that teleporting a random state through `M̃` succeeds with fidelity 1.
/// Trial `t` uses stream `t` of the generator seeded by `seed`.
pub fn verify_partial_basis(
    basis: &MagicPartialBasis,
    trials: usize,
    seed: u64,
    tol: Tolerance,
    phases: CoefficientPhases,
) -> Result<PartialBasisVerification> {
    if trials == 0 {
        return Err(QtelError::Domain(
            "verification needs at least one trial".into(),
        ));
    }
    let n = basis.n;
    let target = 2f64.powi(-(n as i32));
    let bell = BellBasis::standard(n)?;

    let max_member_deviation = basis
        .matrices
        .iter()
        .map(|m| {
            m.dagger()
                .matmul(m)
                .and_then(|g| g.is_scaled_identity(target, tol))
                .map(|c| c.max_deviation)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut max_gram_deviation: f64 = 0.0;
    let mut max_fidelity_deficit: f64 = 0.0;
    let mut failed_trials = 0;
    for t in 0..trials {
        let mut rng = seeded_stream(seed, t as u64);
        let coefficients = draw_coefficients(&mut rng, basis.dimension(), phases);
        let m = basis.combine(&coefficients)?;
        let gram = m.dagger().matmul(&m)?.is_scaled_identity(target, tol)?;
        let channel = Channel::from_matrix(m, Tolerance::new(1e-9)?)?;
        let info = random_state(&mut rng, n)?;
        let run = run_protocol(&info, &channel, &bell, Mode::Exhaustive, tol)?;
        let deficit = 1.0 - run.min_fidelity().unwrap_or(0.0);
        max_gram_deviation = max_gram_deviation.max(gram.max_deviation);
        max_fidelity_deficit = max_fidelity_deficit.max(deficit);
        if !gram.holds || deficit > tol.eps() {
            failed_trials += 1;
        }
    }

    let orthonormality_deviation = basis.orthonormality_deviation();
    Ok(PartialBasisVerification {
        dimension: basis.dimension(),
        trials,
        seed,
        phases,
        max_gram_deviation,
        max_fidelity_deficit,
        max_member_deviation,
        orthonormality_deviation,
        failed_trials,
        passed: failed_trials == 0
            && max_member_deviation <= tol.eps()
            && orthonormality_deviation <= tol.eps(),
    })
}

/// How the GHZ channel relates to one maximal partial basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhzExpansion {
    pub source_set: Vec<PauliString>,
    /// Norm of the component outside the span of the basis.
    pub residual_norm: f64,
    /// Whether the nonzero expansion coefficients share one phase.
    pub common_phase: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhzCounterexample {
    /// Largest deviation of `E†E` from `2^{-n}·1`.
    pub perfect_deviation: f64,
    pub expansions: Vec<GhzExpansion>,
    /// True when the channel is imperfect and no maximal partial basis
    /// represents it with common-phase coefficients.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoMagicBasisWitness {
    pub n: usize,
    pub vertices: usize,
    pub edges: usize,
    pub maximal_cliques_enumerated: usize,
    pub max_clique: usize,
    /// Anticommuting strings a full magic basis would need, `4^n − 1`.
    pub required: usize,
    pub max_partial_dimension: usize,
    pub full_dimension: usize,
    /// True when the largest anticommuting set falls short of `required`.
    pub obstruction: bool,
    pub ghz_counterexample: Option<GhzCounterexample>,
}

fn shares_phase(coefficients: &[C64], eps: f64) -> bool {
    let mut reference: Option<C64> = None;
    for c in coefficients.iter().filter(|c| c.norm() > eps) {
        let unit = c / c.norm();
        match reference {
            None => reference = Some(unit),
            Some(r) if (unit - r).norm() > 1e-9 => return false,
            Some(_) => {}
        }
    }
    true
}

fn ghz_counterexample(
    n: usize,
    report: &CliqueReport,
    graph: &AnticommGraph,
    tol: Tolerance,
) -> Result<GhzCounterexample> {
    let ghz = Channel::ghz(n)?;
    let perfect = ghz.is_perfect(tol);
    let expansions = report
        .maximum_cliques()
        .map(|clique| {
            let set: Vec<PauliString> = clique.iter().map(|&v| graph.vertices()[v]).collect();
            let basis = partial_basis_from_set(&set)?;
            let (coefficients, residual_norm) = basis.expand(ghz.state())?;
            Ok(GhzExpansion {
                source_set: basis.source_set().to_vec(),
                residual_norm,
                common_phase: shares_phase(&coefficients, 1e-12),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let holds = !perfect.holds
        && expansions
            .iter()
            .all(|e| e.residual_norm > tol.eps() || !e.common_phase);
    Ok(GhzCounterexample {
        perfect_deviation: perfect.max_deviation,
        expansions,
        holds,
    })
}

/// Enumerates every maximal anticommuting set and reports whether the largest
/// one is too small for a full magic basis. For `n ≥ 2` the GHZ state is also
/// checked against every maximal partial basis.
pub fn no_full_magic_basis_witness(n: usize) -> Result<NoMagicBasisWitness> {
    let graph = AnticommGraph::build(n)?;
    let report = maximal_anticommuting_sets(&graph);
    let required = (1usize << (2 * n)) - 1;
    let ghz_counterexample = if n >= 2 {
        Some(ghz_counterexample(
            n,
            &report,
            &graph,
            Tolerance::default(),
        )?)
    } else {
        None
    };
    Ok(NoMagicBasisWitness {
        n,
        vertices: graph.len(),
        edges: graph.edge_count(),
        maximal_cliques_enumerated: report.maximal_cliques.len(),
        max_clique: report.max_size,
        required,
        max_partial_dimension: report.max_size + 1,
        full_dimension: required + 1,
        obstruction: report.max_size < required,
        ghz_counterexample,
    })
}
