//! Teleportation of an N-qubit state through a 2N-qubit channel with a
//! generalized Bell measurement.
//!
//! For outcome `α` Bob holds the unnormalized amplitudes
//! `b = O^(α)·I` with the transformation operator `O^(α) = Eᵀ·B^(α)†`.
//! When the channel and the measured member are both maximally entangled
//! (`E†E = B†B = 2^{-N}·1`) the correction `U^(α) = 2^N·B^(α)·E*` restores
//! the input exactly, and `U^(α) = 2^{-N}·(O^(α))^{-1}`.

use serde::Serialize;

use crate::bell::BellBasis;
use crate::channel::{concurrence_2q, Channel};
use crate::error::{QtelError, Result};
use crate::matrix::{ComplexMatrix, StateVector, Tolerance, C64};
use crate::random::seeded;
use rand::Rng;

/// Outcomes with probability below this are treated as impossible.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;

/// How Bob's correction for an outcome was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionKind {
    /// `2^N·B^(α)·E*` for a perfect channel and maximal member.
    Synthesized,
    /// `O^(α)†/√s` where `O^(α)†O^(α) = s·1`.
    InverseTransformation,
    /// Correction that would be exact for the reference channel `2^{-N/2}·1`.
    Reference,
    /// No usable inverse; Bob does nothing.
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedCorrection {
    pub kind: CorrectionKind,
    pub matrix: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRecord {
    pub alpha: usize,
    pub probability: f64,
    /// Set when the probability is below [`NEGLIGIBLE_PROBABILITY`]; Bob's
    /// state is undefined and no fidelity is reported.
    pub negligible: bool,
    pub bob_state: Option<StateVector>,
    pub corrected_state: Option<StateVector>,
    pub fidelity: Option<f64>,
    pub correction: Option<CorrectionKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformationOperator {
    pub alpha: usize,
    pub matrix: ComplexMatrix,
    pub unitary_scaled: bool,
    /// `s` in `O†O ≈ s·1` (mean diagonal of `O†O`).
    pub scale: f64,
    /// Largest deviation of `O†O` from `s·1`.
    pub deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, shots: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub seed: u64,
    pub shots: u64,
    pub counts: Vec<u64>,
    /// Fidelity averaged over the drawn shots.
    pub mean_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub mode: Mode,
    pub records: Vec<OutcomeRecord>,
    pub samples: Option<SampleSummary>,
}

impl ProtocolRun {
    pub fn total_probability(&self) -> f64 {
        self.records.iter().map(|r| r.probability).sum()
    }

    /// Smallest fidelity among outcomes that can occur.
    pub fn min_fidelity(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.fidelity)
            .min_by(f64::total_cmp)
    }

    /// Probability-weighted fidelity.
    pub fn average_fidelity(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.probability * r.fidelity.unwrap_or(0.0))
            .sum()
    }
}

fn check_dims(info: &StateVector, ch: &Channel, basis: &BellBasis) -> Result<()> {
    let n = info.n_qubits();
    if ch.n() != n || basis.n() != n {
        return Err(QtelError::shape(
            "teleport",
            format!(
                "info has {n} qubits, channel n = {}, basis n = {}",
                ch.n(),
                basis.n()
            ),
        ));
    }
    Ok(())
}

fn check_info(info: &StateVector, tol: Tolerance) -> Result<()> {
    if !info.is_normalized(tol) {
        return Err(QtelError::Validation {
            what: "information state is not normalized".into(),
            deviation: (info.norm_sqr() - 1.0).abs(),
        });
    }
    Ok(())
}

/// `O^(α) = Eᵀ·B^(α)†` with its scaled-unitarity flag.
pub fn transformation_operator(
    ch: &Channel,
    basis: &BellBasis,
    alpha: usize,
    tol: Tolerance,
) -> Result<TransformationOperator> {
    if ch.n() != basis.n() {
        return Err(QtelError::shape(
            "transformation_operator",
            format!("channel n = {}, basis n = {}", ch.n(), basis.n()),
        ));
    }
    let matrix = ch
        .e_matrix()
        .transpose()
        .matmul(&basis.member(alpha)?.dagger())?;
    let gram = matrix.dagger().matmul(&matrix)?;
    let dim = gram.rows() as f64;
    let scale = gram.trace()?.re / dim;
    let check = gram.is_scaled_identity(scale, tol)?;
    Ok(TransformationOperator {
        alpha,
        unitary_scaled: check.holds && scale > tol.eps(),
        matrix,
        scale,
        deviation: check.max_deviation,
    })
}

/// Expands `|I⟩|E⟩` over the measurement basis: one record per outcome with
/// its probability and Bob's normalized state, no correction applied.
pub fn composite_expand(
    info: &StateVector,
    ch: &Channel,
    basis: &BellBasis,
) -> Result<Vec<OutcomeRecord>> {
    check_dims(info, ch, basis)?;
    check_info(info, Tolerance::default())?;
    let et = ch.e_matrix().transpose();
    (0..basis.len())
        .map(|alpha| {
            let b_dag = basis.member(alpha)?.dagger();
            let amps = et.apply(&b_dag.apply(info.amplitudes())?)?;
            let unnormalized = StateVector::new(info.n_qubits(), amps)?;
            let probability = unnormalized.norm_sqr();
            let negligible = probability < NEGLIGIBLE_PROBABILITY;
            Ok(OutcomeRecord {
                alpha,
                probability,
                negligible,
                bob_state: if negligible {
                    None
                } else {
                    unnormalized.normalized()
                },
                corrected_state: None,
                fidelity: None,
                correction: None,
            })
        })
        .collect()
}

/// `U^(α) = 2^N·B^(α)·E*`, verified unitary before it is returned.
pub fn correction_unitary(
    ch: &Channel,
    basis: &BellBasis,
    alpha: usize,
    tol: Tolerance,
) -> Result<ComplexMatrix> {
    if ch.n() != basis.n() {
        return Err(QtelError::shape(
            "correction_unitary",
            format!("channel n = {}, basis n = {}", ch.n(), basis.n()),
        ));
    }
    let perfect = ch.is_perfect(tol);
    if !perfect.holds {
        return Err(QtelError::Precondition {
            what: "channel is not perfect (E†E ≠ 2^-n·1)".into(),
            deviation: perfect.max_deviation,
        });
    }
    let maximal = basis.is_maximal_member(alpha, tol)?;
    if !maximal.holds {
        return Err(QtelError::Precondition {
            what: format!("basis member {alpha} is not maximal (B†B ≠ 2^-n·1)"),
            deviation: maximal.max_deviation,
        });
    }
    let u = basis
        .member(alpha)?
        .matmul(&ch.e_matrix().conj())?
        .scale_real(2f64.powi(ch.n() as i32));
    let unitary = u.unitarity(tol.scaled(10.0))?;
    if !unitary.holds {
        return Err(QtelError::Internal {
            what: format!("synthesized correction {alpha} is not unitary"),
            deviation: unitary.max_deviation,
        });
    }
    Ok(u)
}

/// Best available correction per outcome: the synthesized unitary when the
/// channel and member are maximal, else the normalized inverse of a
/// scaled-unitary transformation operator, else the identity.
pub fn plan_corrections(
    ch: &Channel,
    basis: &BellBasis,
    tol: Tolerance,
) -> Result<Vec<PlannedCorrection>> {
    (0..basis.len())
        .map(|alpha| {
            if let Ok(matrix) = correction_unitary(ch, basis, alpha, tol) {
                return Ok(PlannedCorrection {
                    kind: CorrectionKind::Synthesized,
                    matrix,
                });
            }
            let op = transformation_operator(ch, basis, alpha, tol)?;
            if op.unitary_scaled {
                Ok(PlannedCorrection {
                    kind: CorrectionKind::InverseTransformation,
                    matrix: op.matrix.dagger().scale_real(op.scale.sqrt().recip()),
                })
            } else {
                Ok(PlannedCorrection {
                    kind: CorrectionKind::Identity,
                    matrix: ComplexMatrix::identity(1usize << ch.n()),
                })
            }
        })
        .collect()
}

/// Corrections that are exact for the reference channel `2^{-N/2}·1`,
/// `2^{N/2}·B^(α)`. For the standard basis these are the Pauli strings.
pub fn reference_corrections(basis: &BellBasis) -> Vec<PlannedCorrection> {
    let factor = 2f64.powf(basis.n() as f64 / 2.0);
    basis
        .members()
        .iter()
        .map(|b| PlannedCorrection {
            kind: CorrectionKind::Reference,
            matrix: b.scale_real(factor),
        })
        .collect()
}

fn apply_corrections(
    info: &StateVector,
    records: &mut [OutcomeRecord],
    corrections: &[PlannedCorrection],
) -> Result<()> {
    for (rec, corr) in records.iter_mut().zip(corrections) {
        let Some(bob) = &rec.bob_state else { continue };
        let corrected =
            bob.apply(&corr.matrix)?
                .normalized()
                .ok_or_else(|| QtelError::Internal {
                    what: format!("correction {} annihilated Bob's state", rec.alpha),
                    deviation: 1.0,
                })?;
        rec.fidelity = Some(info.fidelity(&corrected)?.min(1.0));
        rec.corrected_state = Some(corrected);
        rec.correction = Some(corr.kind);
    }
    Ok(())
}

fn sample_outcomes(records: &[OutcomeRecord], seed: u64, shots: u64) -> Result<SampleSummary> {
    if shots == 0 {
        return Err(QtelError::Domain(
            "sampled mode needs at least one shot".into(),
        ));
    }
    let total: f64 = records.iter().map(|r| r.probability).sum();
    let mut rng = seeded(seed);
    let mut counts = vec![0u64; records.len()];
    let mut fidelity_sum = 0.0;
    for _ in 0..shots {
        let mut u: f64 = rng.random::<f64>() * total;
        let mut pick = records.len() - 1;
        for (k, r) in records.iter().enumerate() {
            if u < r.probability {
                pick = k;
                break;
            }
            u -= r.probability;
        }
        counts[pick] += 1;
        fidelity_sum += records[pick].fidelity.unwrap_or(0.0);
    }
    Ok(SampleSummary {
        seed,
        shots,
        counts,
        mean_fidelity: fidelity_sum / shots as f64,
    })
}

/// Runs the protocol with caller-supplied corrections (one per outcome).
pub fn run_with_corrections(
    info: &StateVector,
    ch: &Channel,
    basis: &BellBasis,
    corrections: &[PlannedCorrection],
    mode: Mode,
) -> Result<ProtocolRun> {
    if corrections.len() != basis.len() {
        return Err(QtelError::shape(
            "run_with_corrections",
            format!(
                "{} corrections for {} outcomes",
                corrections.len(),
                basis.len()
            ),
        ));
    }
    let mut records = composite_expand(info, ch, basis)?;
    apply_corrections(info, &mut records, corrections)?;
    let samples = match mode {
        Mode::Exhaustive => None,
        Mode::Sampled { seed, shots } => Some(sample_outcomes(&records, seed, shots)?),
    };
    Ok(ProtocolRun {
        mode,
        records,
        samples,
    })
}

/// Full protocol with the best available correction for every outcome.
/// Imperfect channels are allowed; their damage shows up in the fidelities.
pub fn run_protocol(
    info: &StateVector,
    ch: &Channel,
    basis: &BellBasis,
    mode: Mode,
    tol: Tolerance,
) -> Result<ProtocolRun> {
    check_dims(info, ch, basis)?;
    let corrections = plan_corrections(ch, basis, tol)?;
    run_with_corrections(info, ch, basis, &corrections, mode)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelOperator {
    pub matrix: ComplexMatrix,
    /// True when `matrix` is the synthesized correction `U^(0)`; otherwise it
    /// is the transformation operator `O^(0)`.
    pub is_correction: bool,
    pub unitary_scaled: bool,
    pub rank: usize,
}

/// Operator attached to the seed outcome `α = 0`.
pub fn kernel_operator(ch: &Channel, basis: &BellBasis, tol: Tolerance) -> Result<KernelOperator> {
    match correction_unitary(ch, basis, 0, tol) {
        Ok(matrix) => Ok(KernelOperator {
            rank: matrix.rank(tol.eps()),
            matrix,
            is_correction: true,
            unitary_scaled: true,
        }),
        Err(QtelError::Precondition { .. }) => {
            let op = transformation_operator(ch, basis, 0, tol)?;
            Ok(KernelOperator {
                rank: op.matrix.rank(tol.eps()),
                matrix: op.matrix,
                is_correction: false,
                unitary_scaled: op.unitary_scaled,
            })
        }
        Err(e) => Err(e),
    }
}

/// Minimum assured fidelity of a single-qubit channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MasfiReport {
    pub masfi: f64,
    pub concurrence: f64,
    /// `2C/(1+C)` for comparison.
    pub closed_form: f64,
    pub schmidt_coefficients: [f64; 2],
    /// Bloch angles `(θ, φ)` of the minimizing information state.
    pub minimizer: [f64; 2],
    /// Outcome attaining the minimum.
    pub worst_outcome: usize,
    pub degenerate: bool,
    pub converged: bool,
    pub refinement_iterations: usize,
}

pub const MASFI_THETA_STEPS: usize = 64;
pub const MASFI_PHI_STEPS: usize = 128;
pub const MASFI_REFINE_TOL: f64 = 1e-4;

fn bloch_state(theta: f64, phi: f64) -> StateVector {
    let (s, c) = (theta / 2.0).sin_cos();
    StateVector::new(1, vec![C64::new(c, 0.0), C64::from_polar(s, phi)]).expect("valid qubit")
}

/// Nelder–Mead on two variables. Returns the best vertex, its value,
/// whether the simplex shrank below `tol`, and the iteration count.
fn nelder_mead_2d(
    f: impl Fn([f64; 2]) -> f64,
    start: [f64; 2],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> ([f64; 2], f64, bool, usize) {
    let mut simplex = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ];
    let mut values = simplex.map(&f);
    for iter in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|k| simplex[k]);
        values = order.map(|k| values[k]);

        let size = simplex[1..]
            .iter()
            .map(|v| ((v[0] - simplex[0][0]).powi(2) + (v[1] - simplex[0][1]).powi(2)).sqrt())
            .fold(0.0, f64::max);
        if size < tol {
            return (simplex[0], values[0], true, iter);
        }

        let centroid = [
            (simplex[0][0] + simplex[1][0]) / 2.0,
            (simplex[0][1] + simplex[1][1]) / 2.0,
        ];
        let towards = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let reflected = towards(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = towards(-2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted = if fr < values[2] {
                towards(-0.5)
            } else {
                towards(0.5)
            };
            let fc = f(contracted);
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = [
                        simplex[0][0] + 0.5 * (simplex[k][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[k][1] - simplex[0][1]),
                    ];
                    values[k] = f(simplex[k]);
                }
            }
        }
    }
    let best = (0..3)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    (simplex[best], values[best], false, max_iter)
}

/// Minimum over information states of the worst-outcome fidelity, using the
/// standard Bell basis and reference (Pauli) corrections. The search is a
/// `64 × 128` grid over `(θ, φ)` followed by a Nelder–Mead refinement.
pub fn masfi_1q(ch: &Channel) -> Result<MasfiReport> {
    if ch.n() != 1 {
        return Err(QtelError::Domain(format!(
            "MASFI is defined here for n = 1, got n = {}",
            ch.n()
        )));
    }
    let concurrence = concurrence_2q(ch.state())?;
    let closed_form = 2.0 * concurrence / (1.0 + concurrence);
    let schmidt = ch.schmidt_coefficients_1q()?;
    if schmidt[1] < 1e-12 {
        return Ok(MasfiReport {
            masfi: 0.0,
            concurrence,
            closed_form,
            schmidt_coefficients: schmidt,
            minimizer: [0.0, 0.0],
            worst_outcome: 0,
            degenerate: true,
            converged: true,
            refinement_iterations: 0,
        });
    }

    let basis = BellBasis::standard(1)?;
    let corrections = reference_corrections(&basis);
    let worst = |angles: [f64; 2]| -> (f64, usize) {
        let info = bloch_state(angles[0], angles[1]);
        let run = run_with_corrections(&info, ch, &basis, &corrections, Mode::Exhaustive)
            .expect("dimensions fixed");
        run.records
            .iter()
            .filter_map(|r| r.fidelity.map(|f| (f, r.alpha)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap_or((1.0, 0))
    };

    let mut best = ([0.0, 0.0], f64::INFINITY);
    for ti in 0..MASFI_THETA_STEPS {
        let theta = std::f64::consts::PI * ti as f64 / (MASFI_THETA_STEPS - 1) as f64;
        for pi in 0..MASFI_PHI_STEPS {
            let phi = 2.0 * std::f64::consts::PI * pi as f64 / MASFI_PHI_STEPS as f64;
            let (v, _) = worst([theta, phi]);
            if v < best.1 {
                best = ([theta, phi], v);
            }
        }
    }

    let step = std::f64::consts::PI / MASFI_THETA_STEPS as f64;
    let (x, fx, converged, iterations) =
        nelder_mead_2d(|a| worst(a).0, best.0, step, MASFI_REFINE_TOL, 500);
    let (minimizer, masfi) = if fx < best.1 { (x, fx) } else { best };
    Ok(MasfiReport {
        masfi,
        concurrence,
        closed_form,
        schmidt_coefficients: schmidt,
        minimizer,
        worst_outcome: worst(minimizer).1,
        degenerate: false,
        converged,
        refinement_iterations: iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use crate::random::{random_perfect_channel, random_state, seeded};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn single_qubit_outcomes_uniform() {
        let ch = Channel::bell_pairs(1).unwrap();
        let b = BellBasis::standard(1).unwrap();
        let recs = composite_expand(&StateVector::basis(1, 0).unwrap(), &ch, &b).unwrap();
        assert_eq!(recs.len(), 4);
        for r in recs {
            assert!((r.probability - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn two_qubit_outcomes_uniform() {
        let ch = Channel::bell_pairs(2).unwrap();
        let b = BellBasis::standard(2).unwrap();
        let info = random_state(&mut seeded(11), 2).unwrap();
        for r in composite_expand(&info, &ch, &b).unwrap() {
            assert!((r.probability - 1.0 / 16.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ghz_outcomes_can_vanish() {
        let ch = Channel::ghz(2).unwrap();
        let b = BellBasis::standard(2).unwrap();
        let recs = composite_expand(&StateVector::basis(2, 0b01).unwrap(), &ch, &b).unwrap();
        assert!(recs.iter().any(|r| r.negligible && r.probability == 0.0));
        let total: f64 = recs.iter().map(|r| r.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corrections_for_bell_pair() {
        let ch = Channel::bell_pairs(1).unwrap();
        let b = BellBasis::standard(1).unwrap();
        let u0 = correction_unitary(&ch, &b, 0, tol()).unwrap();
        assert!(u0.max_abs_diff(&ComplexMatrix::identity(2)).unwrap() < 1e-15);
        let u1 = correction_unitary(&ch, &b, 1, tol()).unwrap();
        assert!(u1.max_abs_diff(&Pauli::Z.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn correction_rejects_imperfect_channel() {
        let b = BellBasis::standard(2).unwrap();
        match correction_unitary(&Channel::ghz(2).unwrap(), &b, 0, tol()) {
            Err(QtelError::Precondition { deviation, .. }) => {
                assert!((deviation - 0.25).abs() < 1e-15)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn random_perfect_channel_corrections_unitary() {
        let mut rng = seeded(5);
        let ch = random_perfect_channel(&mut rng, 2).unwrap();
        let b = BellBasis::standard(2).unwrap();
        for alpha in 0..16 {
            let u = correction_unitary(&ch, &b, alpha, tol()).unwrap();
            assert!(u.unitarity(tol()).unwrap().holds);
        }
    }

    #[test]
    fn perfect_channel_perfect_fidelity() {
        let mut rng = seeded(9);
        let ch = random_perfect_channel(&mut rng, 2).unwrap();
        let b = BellBasis::standard(2).unwrap();
        let info = random_state(&mut rng, 2).unwrap();
        let run = run_protocol(&info, &ch, &b, Mode::Exhaustive, tol()).unwrap();
        for r in &run.records {
            assert!((r.fidelity.unwrap() - 1.0).abs() < 1e-9);
            assert_eq!(r.correction, Some(CorrectionKind::Synthesized));
        }
    }

    #[test]
    fn ghz_protocol_loses_fidelity() {
        let ch = Channel::ghz(2).unwrap();
        let b = BellBasis::standard(2).unwrap();
        let info = Channel::bell_pairs(1).unwrap().state().clone();
        let run = run_protocol(&info, &ch, &b, Mode::Exhaustive, tol()).unwrap();
        assert!(run.min_fidelity().unwrap() < 1.0 - 1e-6);
    }

    #[test]
    fn transformation_operator_cases() {
        let b = BellBasis::standard(2).unwrap();
        let ghz = Channel::ghz(2).unwrap();
        for alpha in 0..16 {
            let op = transformation_operator(&ghz, &b, alpha, tol()).unwrap();
            assert!(!op.unitary_scaled);
            assert_eq!(op.matrix.rank(1e-12), 2);
        }

        let weighted = Channel::schmidt_1q(0.7).unwrap();
        let b1 = BellBasis::standard(1).unwrap();
        for alpha in 0..4 {
            let op = transformation_operator(&weighted, &b1, alpha, tol()).unwrap();
            assert!(!op.unitary_scaled);
            assert!(op.matrix.inverse(1e-12).unwrap().is_some());
        }
    }

    #[test]
    fn inverse_relation_for_perfect_channel() {
        let mut rng = seeded(21);
        let ch = random_perfect_channel(&mut rng, 2).unwrap();
        let b = BellBasis::standard(2).unwrap();
        for alpha in 0..16 {
            let op = transformation_operator(&ch, &b, alpha, tol()).unwrap();
            assert!(op.unitary_scaled);
            let inv = op.matrix.inverse(1e-12).unwrap().unwrap().scale_real(0.25);
            let u = correction_unitary(&ch, &b, alpha, tol()).unwrap();
            assert!(inv.max_abs_diff(&u).unwrap() < 1e-9);
        }
    }

    #[test]
    fn kernel_operator_cases() {
        let b1 = BellBasis::standard(1).unwrap();
        let k = kernel_operator(&Channel::bell_pairs(1).unwrap(), &b1, tol()).unwrap();
        assert!(k.is_correction);
        assert!(k.matrix.max_abs_diff(&ComplexMatrix::identity(2)).unwrap() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z_rotated = StateVector::new(
            1 + 1,
            vec![
                C64::new(s, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-s, 0.0),
            ],
        )
        .unwrap();
        let ch = Channel::from_state(z_rotated, 1, tol()).unwrap();
        let k = kernel_operator(&ch, &b1, tol()).unwrap();
        assert!(k.matrix.max_abs_diff(&Pauli::Z.matrix()).unwrap() < 1e-15);

        let k = kernel_operator(
            &Channel::ghz(2).unwrap(),
            &BellBasis::standard(2).unwrap(),
            tol(),
        )
        .unwrap();
        assert!(!k.is_correction);
        assert_eq!(k.rank, 2);
        assert!(!k.unitary_scaled);
    }

    #[test]
    fn sampled_mode_is_seeded() {
        let ch = Channel::bell_pairs(1).unwrap();
        let b = BellBasis::standard(1).unwrap();
        let info = bloch_state(1.0, 0.3);
        let mode = Mode::Sampled {
            seed: 3,
            shots: 1000,
        };
        let a = run_protocol(&info, &ch, &b, mode, tol()).unwrap();
        let c = run_protocol(&info, &ch, &b, mode, tol()).unwrap();
        assert_eq!(a.samples, c.samples);
        assert_eq!(a.samples.as_ref().unwrap().counts.iter().sum::<u64>(), 1000);
        assert!(run_protocol(&info, &ch, &b, Mode::Sampled { seed: 3, shots: 0 }, tol()).is_err());
    }

    #[test]
    fn masfi_endpoints() {
        let r = masfi_1q(&Channel::bell_pairs(1).unwrap()).unwrap();
        assert!((r.masfi - 1.0).abs() < 1e-9);
        assert!((r.closed_form - 1.0).abs() < 1e-12);

        let degenerate = masfi_1q(&Channel::schmidt_1q(1.0).unwrap()).unwrap();
        assert!(degenerate.degenerate);
        assert_eq!(degenerate.masfi, 0.0);
        assert!(masfi_1q(&Channel::bell_pairs(2).unwrap()).is_err());
    }

    #[test]
    fn masfi_weighted_channel() {
        let r = masfi_1q(&Channel::schmidt_1q(0.8).unwrap()).unwrap();
        assert!((r.concurrence - 0.8).abs() < 1e-12);
        assert!((r.masfi - 2.0 * 0.8 / 1.8).abs() < 1e-3, "{r:?}");
        assert!(r.converged);
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (x, fx, converged, _) = nelder_mead_2d(
            |p| (p[0] - 1.0).powi(2) + 2.0 * (p[1] + 0.5).powi(2),
            [0.0, 0.0],
            0.3,
            1e-8,
            1000,
        );
        assert!(converged);
        assert!(fx < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 0.5).abs() < 1e-5);
    }
}
