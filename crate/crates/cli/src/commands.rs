use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use qtel_core::io::{self, Report};
use qtel_core::magic::{
    maximal_anticommuting_sets, n2_catalog, no_full_magic_basis_witness, partial_basis_from_set,
    resolve_set, verify_partial_basis, AnticommGraph, CoefficientPhases, PartialBasisVerification,
};
use qtel_core::teleport::{masfi_1q, run_protocol, CorrectionKind, MasfiReport};
use qtel_core::{
    BellBasis, Channel, Mode, PauliString, QtelError, ScaledIdentityCheck, StateVector, Tolerance,
};

use crate::args::*;

/// Exit code 2: bad usage or unreadable input. Exit code 1: a check failed.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<QtelError> for Failure {
    fn from(e: QtelError) -> Self {
        let code = match e {
            QtelError::Internal { .. } | QtelError::Precondition { .. } => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub struct Output {
    pub body: String,
    pub ok: bool,
}

type CmdResult = Result<Output, Failure>;

fn emit<T: Serialize>(
    format: Format,
    command: &str,
    ok: bool,
    data: &T,
    text: impl FnOnce() -> String,
) -> Output {
    let body = match format {
        Format::Json => Report::new(command, ok, data).to_json() + "\n",
        Format::Text => text(),
    };
    Output { body, ok }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_state(path: &Path) -> Result<StateVector, Failure> {
    io::parse_state(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn channel_from_state(state: StateVector, path: &Path, tol: Tolerance) -> Result<Channel, Failure> {
    if !state.n_qubits().is_multiple_of(2) {
        return Err(Failure::usage(format!(
            "{}: channel needs an even number of qubits, got {}",
            path.display(),
            state.n_qubits()
        )));
    }
    let n = state.n_qubits() / 2;
    Channel::from_state(state, n, tol)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct CheckJson {
    holds: bool,
    max_deviation: f64,
}

impl From<ScaledIdentityCheck> for CheckJson {
    fn from(c: ScaledIdentityCheck) -> Self {
        Self {
            holds: c.holds,
            max_deviation: c.max_deviation,
        }
    }
}

pub fn run(cli: &Cli) -> CmdResult {
    let tol = cli.tol;
    let f = cli.format;
    match &cli.command {
        Command::Channel(ChannelCmd::Check { file }) => channel_check(f, tol, file),
        Command::Bell(BellCmd::Gen { n, seed_file, out }) => {
            bell_gen(f, tol, *n, seed_file.as_deref(), out.as_deref())
        }
        Command::Teleport(TeleportCmd::Run(args)) => teleport_run(f, tol, args),
        Command::Magic(MagicCmd::Cliques { n, all }) => magic_cliques(f, *n as usize, *all),
        Command::Magic(MagicCmd::Catalog) => magic_catalog(f),
        Command::Magic(MagicCmd::Verify {
            set,
            n,
            trials,
            seed,
            phases,
        }) => magic_verify(
            f,
            tol,
            set.as_deref(),
            *n as usize,
            *trials as usize,
            *seed,
            *phases,
        ),
        Command::Magic(MagicCmd::Witness { n }) => magic_witness(f, *n as usize),
        Command::Masfi(args) => masfi(f, tol, args),
    }
}

#[derive(Serialize)]
struct ChannelCheckJson {
    n: usize,
    target_scale: f64,
    perfect: CheckJson,
    character_unitarity: CheckJson,
    concurrence: Option<f64>,
}

fn channel_check(f: Format, tol: Tolerance, file: &Path) -> CmdResult {
    let ch = channel_from_state(read_state(file)?, file, tol)?;
    let perfect = ch.is_perfect(tol);
    let character = ch.character_matrix().unitarity(tol)?;
    let concurrence = if ch.n() == 1 {
        Some(qtel_core::concurrence_2q(ch.state())?)
    } else {
        None
    };
    let data = ChannelCheckJson {
        n: ch.n(),
        target_scale: 2f64.powi(-(ch.n() as i32)),
        perfect: perfect.into(),
        character_unitarity: character.into(),
        concurrence,
    };
    Ok(emit(f, "channel check", perfect.holds, &data, || {
        let mut s = String::new();
        writeln!(s, "n = {}", data.n).unwrap();
        writeln!(
            s,
            "E†E = 2^-{}·1: {}",
            data.n,
            if perfect.holds { "holds" } else { "fails" }
        )
        .unwrap();
        writeln!(s, "deviation {}", perfect.max_deviation).unwrap();
        if let Some(c) = concurrence {
            writeln!(s, "concurrence {c:.12}").unwrap();
        }
        s
    }))
}

#[derive(Serialize)]
struct BellGenJson<'a> {
    n: usize,
    orthonormality_deviation: f64,
    completeness: CheckJson,
    members: &'a [qtel_core::ComplexMatrix],
}

fn bell_gen(
    f: Format,
    tol: Tolerance,
    n: Option<usize>,
    seed_file: Option<&Path>,
    out: Option<&Path>,
) -> CmdResult {
    let basis = match (seed_file, n) {
        (Some(path), n) => {
            let seed = read_state(path)?;
            if let Some(n) = n {
                if seed.n_qubits() != 2 * n {
                    return Err(Failure::usage(format!(
                        "{}: seed has {} qubits, --n {n} needs {}",
                        path.display(),
                        seed.n_qubits(),
                        2 * n
                    )));
                }
            }
            BellBasis::generate_from_seed(&seed, tol)?
        }
        (None, Some(n)) => BellBasis::standard(n)?,
        (None, None) => return Err(Failure::usage("give --n or --seed-file")),
    };
    let completeness = basis.verify_completeness(tol);
    if let Some(path) = out {
        fs::write(path, io::basis_to_json(&basis) + "\n")
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    let data = BellGenJson {
        n: basis.n(),
        orthonormality_deviation: basis.orthonormality_deviation(),
        completeness: completeness.into(),
        members: basis.members(),
    };
    Ok(emit(f, "bell gen", completeness.holds, &data, || {
        let mut s = String::new();
        writeln!(s, "n = {}, {} members", basis.n(), basis.len()).unwrap();
        writeln!(
            s,
            "orthonormality deviation {:.3e}",
            data.orthonormality_deviation
        )
        .unwrap();
        writeln!(
            s,
            "completeness deviation {:.3e}",
            completeness.max_deviation
        )
        .unwrap();
        if let Some(path) = out {
            writeln!(s, "written to {}", path.display()).unwrap();
        }
        s
    }))
}

#[derive(Serialize)]
struct OutcomeJson {
    alpha: usize,
    pauli: Option<String>,
    probability: f64,
    fidelity: Option<f64>,
    correction: Option<CorrectionKind>,
}

#[derive(Serialize)]
struct TeleportJson {
    n: usize,
    mode: Mode,
    standard_basis: bool,
    channel_perfect: CheckJson,
    outcomes: Vec<OutcomeJson>,
    total_probability: f64,
    min_fidelity: Option<f64>,
    average_fidelity: f64,
    samples: Option<qtel_core::teleport::SampleSummary>,
    expect_perfect: bool,
}

fn teleport_run(f: Format, tol: Tolerance, args: &TeleportArgs) -> CmdResult {
    let info = read_state(&args.info)?;
    let ch = channel_from_state(read_state(&args.channel)?, &args.channel, tol)?;
    let n = info.n_qubits();
    if let Some(want) = args.n {
        if want != n {
            return Err(Failure::usage(format!(
                "--n {want} but the information state has {n} qubits"
            )));
        }
    }
    if ch.n() != n {
        return Err(Failure::usage(format!(
            "information state has {n} qubits, channel has {} (needs {})",
            2 * ch.n(),
            2 * n
        )));
    }
    let (basis, standard) = match &args.basis {
        Some(path) => {
            let b = io::parse_basis(&read(path)?, tol)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            (b, false)
        }
        None => (BellBasis::standard(n)?, true),
    };
    let mode = match args.mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Sampled => Mode::Sampled {
            seed: args.seed,
            shots: args.shots,
        },
    };
    let run = run_protocol(&info, &ch, &basis, mode, tol)?;
    let perfect = ch.is_perfect(tol);

    let outcomes: Vec<OutcomeJson> = run
        .records
        .iter()
        .map(|r| OutcomeJson {
            alpha: r.alpha,
            pauli: standard.then(|| {
                PauliString::from_alpha(r.alpha, n)
                    .map(|p| p.to_string())
                    .unwrap_or_default()
            }),
            probability: r.probability,
            fidelity: r.fidelity,
            correction: r.correction,
        })
        .collect();
    let min_fidelity = run.min_fidelity();
    let all_faithful = run
        .records
        .iter()
        .all(|r| r.fidelity.is_none_or(|fid| (1.0 - fid).abs() <= tol.eps()));
    let ok = !args.expect_perfect || (perfect.holds && all_faithful);
    let data = TeleportJson {
        n,
        mode,
        standard_basis: standard,
        channel_perfect: perfect.into(),
        outcomes,
        total_probability: run.total_probability(),
        min_fidelity,
        average_fidelity: run.average_fidelity(),
        samples: run.samples.clone(),
        expect_perfect: args.expect_perfect,
    };
    Ok(emit(f, "teleport run", ok, &data, || {
        let mut s = String::new();
        writeln!(
            s,
            "{:>5}  {:<8}  {:>14}  {:>12}  correction",
            "alpha", "pauli", "probability", "fidelity"
        )
        .unwrap();
        for o in &data.outcomes {
            let fid = o
                .fidelity
                .map(|x| format!("{x:.9}"))
                .unwrap_or_else(|| "-".into());
            let corr = o
                .correction
                .map(|c| format!("{c:?}"))
                .unwrap_or_else(|| "-".into());
            writeln!(
                s,
                "{:>5}  {:<8}  {:>14.12}  {:>12}  {}",
                o.alpha,
                o.pauli.as_deref().unwrap_or("-"),
                o.probability,
                fid,
                corr.to_lowercase()
            )
            .unwrap();
        }
        writeln!(
            s,
            "channel perfect: {} (deviation {:.3e})",
            perfect.holds, perfect.max_deviation
        )
        .unwrap();
        writeln!(s, "total probability {:.12}", data.total_probability).unwrap();
        if let Some(m) = min_fidelity {
            writeln!(s, "min fidelity {m:.9}").unwrap();
        }
        writeln!(s, "average fidelity {:.9}", data.average_fidelity).unwrap();
        if let Some(samples) = &data.samples {
            writeln!(
                s,
                "sampled {} shots (seed {}), mean fidelity {:.9}",
                samples.shots, samples.seed, samples.mean_fidelity
            )
            .unwrap();
        }
        s
    }))
}

#[derive(Serialize)]
struct CliquesJson {
    n: usize,
    vertices: usize,
    edges: usize,
    max_size: usize,
    histogram: Vec<(usize, usize)>,
    listed: Vec<Vec<PauliString>>,
}

fn magic_cliques(f: Format, n: usize, all: bool) -> CmdResult {
    let g = AnticommGraph::build(n)?;
    let report = maximal_anticommuting_sets(&g);
    let pick = |c: &Vec<usize>| c.iter().map(|&v| g.vertices()[v]).collect::<Vec<_>>();
    let listed: Vec<Vec<PauliString>> = if all {
        report.maximal_cliques.iter().map(pick).collect()
    } else {
        report.maximum_cliques().map(pick).collect()
    };
    let data = CliquesJson {
        n,
        vertices: g.len(),
        edges: g.edge_count(),
        max_size: report.max_size,
        histogram: report.size_histogram(),
        listed,
    };
    Ok(emit(f, "magic cliques", true, &data, || {
        let mut s = String::new();
        writeln!(
            s,
            "n = {n}: {} vertices, {} edges",
            data.vertices, data.edges
        )
        .unwrap();
        for (size, count) in &data.histogram {
            writeln!(s, "  {count} maximal sets of size {size}").unwrap();
        }
        writeln!(s, "max size {}", data.max_size).unwrap();
        for set in &data.listed {
            let names: Vec<String> = set.iter().map(|p| p.to_string()).collect();
            writeln!(s, "  {{{}}}", names.join(", ")).unwrap();
        }
        s
    }))
}

fn magic_catalog(f: Format) -> CmdResult {
    let cat = n2_catalog()?;
    Ok(emit(f, "magic catalog", true, &cat, || {
        let mut s = String::new();
        writeln!(s, "{:<4} {:<6} {:<8} deviation", "name", "pauli", "listed").unwrap();
        for e in &cat.entries {
            let status = if e.matches { "ok" } else { "differs" };
            writeln!(
                s,
                "{:<4} {:<6} {:<8} {:.3}",
                e.name,
                e.pauli.to_string(),
                status,
                e.max_deviation
            )
            .unwrap();
        }
        writeln!(
            s,
            "largest partial bases (|I⟩ implied), dimension {}:",
            cat.max_partial_dimension
        )
        .unwrap();
        for b in &cat.maximal_partial_bases {
            writeln!(s, "  {{{}}}", b.join(", ")).unwrap();
        }
        let q = &cat.quarter_bases;
        writeln!(
            s,
            "quarter bases: {} in total, at most {} pairwise sharing only |I⟩",
            q.total, q.max_sharing_only_identity
        )
        .unwrap();
        writeln!(s, "reconciliation of listed sets:").unwrap();
        for r in &cat.reconciliation {
            let verdict = if r.exact_match {
                "match".to_string()
            } else {
                r.flags.join("; ")
            };
            writeln!(
                s,
                "  {:<13} {{{}}} -> {{{}}}: {}",
                format!("{:?}", r.kind),
                r.listed.join(", "),
                r.nearest.join(", "),
                verdict
            )
            .unwrap();
        }
        s
    }))
}

#[derive(Serialize)]
struct VerifyJson {
    n: usize,
    results: Vec<VerifyRow>,
}

#[derive(Serialize)]
struct VerifyRow {
    set: Vec<PauliString>,
    verification: PartialBasisVerification,
}

fn magic_verify(
    f: Format,
    tol: Tolerance,
    set: Option<&str>,
    n: usize,
    trials: usize,
    seed: u64,
    phases: PhasesArg,
) -> CmdResult {
    let sets: Vec<Vec<PauliString>> = match set {
        Some(spec) => vec![resolve_set(spec, n)?],
        None => {
            let g = AnticommGraph::build(n)?;
            let report = maximal_anticommuting_sets(&g);
            report
                .maximum_cliques()
                .map(|c| c.iter().map(|&v| g.vertices()[v]).collect())
                .collect()
        }
    };
    let phases = match phases {
        PhasesArg::Global => CoefficientPhases::Global,
        PhasesArg::Independent => CoefficientPhases::Independent,
    };
    let results = sets
        .into_iter()
        .map(|set| {
            let basis = partial_basis_from_set(&set)?;
            let verification = verify_partial_basis(&basis, trials, seed, tol, phases)?;
            Ok(VerifyRow {
                set: basis.source_set().to_vec(),
                verification,
            })
        })
        .collect::<Result<Vec<_>, QtelError>>()?;
    let ok = results.iter().all(|r| r.verification.passed);
    let data = VerifyJson { n, results };
    Ok(emit(f, "magic verify", ok, &data, || {
        let mut s = String::new();
        for r in &data.results {
            let names: Vec<String> = r.set.iter().map(|p| p.to_string()).collect();
            let v = &r.verification;
            writeln!(
                s,
                "{{{}}} dimension {}: {} ({} trials, max M†M deviation {:.3e}, max 1-F {:.3e})",
                names.join(", "),
                v.dimension,
                if v.passed { "pass" } else { "FAIL" },
                v.trials,
                v.max_gram_deviation,
                v.max_fidelity_deficit
            )
            .unwrap();
        }
        s
    }))
}

fn magic_witness(f: Format, n: usize) -> CmdResult {
    let w = no_full_magic_basis_witness(n)?;
    let ok = match &w.ghz_counterexample {
        Some(ghz) => w.obstruction && ghz.holds,
        None => !w.obstruction,
    };
    Ok(emit(f, "magic witness", ok, &w, || {
        let mut s = String::new();
        writeln!(
            s,
            "n = {n}: {} maximal sets enumerated",
            w.maximal_cliques_enumerated
        )
        .unwrap();
        if w.obstruction {
            writeln!(s, "max clique {} < {}", w.max_clique, w.required).unwrap();
            writeln!(
                s,
                "largest magic partial basis has dimension {} of {}",
                w.max_partial_dimension, w.full_dimension
            )
            .unwrap();
        } else {
            writeln!(
                s,
                "max clique {} = {}: a full magic basis exists",
                w.max_clique, w.required
            )
            .unwrap();
        }
        if let Some(ghz) = &w.ghz_counterexample {
            writeln!(s, "GHZ channel: E†E deviation {}", ghz.perfect_deviation).unwrap();
            for e in &ghz.expansions {
                let names: Vec<String> = e.source_set.iter().map(|p| p.to_string()).collect();
                writeln!(
                    s,
                    "  {{{}}}: residual {:.6}, common phase {}",
                    names.join(", "),
                    e.residual_norm,
                    e.common_phase
                )
                .unwrap();
            }
        }
        s
    }))
}

fn masfi(f: Format, tol: Tolerance, args: &MasfiArgs) -> CmdResult {
    let ch = match (&args.source.lambda, &args.source.channel) {
        (Some(lambda), _) => Channel::schmidt_1q(*lambda)?,
        (None, Some(path)) => {
            let ch = channel_from_state(read_state(path)?, path, tol)?;
            if ch.n() != 1 {
                return Err(Failure::usage(format!(
                    "{}: needs a two-qubit channel",
                    path.display()
                )));
            }
            ch
        }
        (None, None) => return Err(Failure::usage("give --lambda or --channel")),
    };
    let report: MasfiReport = masfi_1q(&ch)?;
    let gap = (report.masfi - report.closed_form).abs();
    let ok = report.converged && args.expect_closed_form.is_none_or(|limit| gap <= limit);
    Ok(emit(f, "masfi", ok, &report, || {
        let mut s = String::new();
        writeln!(s, "concurrence {:.12}", report.concurrence).unwrap();
        writeln!(s, "masfi {:.9}", report.masfi).unwrap();
        writeln!(
            s,
            "2C/(1+C) {:.9} (difference {gap:.3e})",
            report.closed_form
        )
        .unwrap();
        writeln!(
            s,
            "minimizer theta {:.6}, phi {:.6}, outcome {}",
            report.minimizer[0], report.minimizer[1], report.worst_outcome
        )
        .unwrap();
        if report.degenerate {
            writeln!(s, "product channel").unwrap();
        }
        if !report.converged {
            writeln!(s, "refinement did not converge").unwrap();
        }
        s
    }))
}
