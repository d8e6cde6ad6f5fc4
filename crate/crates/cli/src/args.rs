use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtel_core::Tolerance;

#[derive(Debug, Parser)]
#[command(
    name = "qtel",
    version,
    about = "Teleportation of N-qubit states over 2N-qubit channels"
)]
pub struct Cli {
    /// Output format. JSON reports carry "schema": "qtel/1".
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Absolute tolerance for numerical checks.
    #[arg(long, global = true, env = "QTEL_TOL", default_value = "1e-9", value_parser = parse_tol)]
    pub tol: Tolerance,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn parse_tol(s: &str) -> Result<Tolerance, String> {
    let eps: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Tolerance::new(eps).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Channel matrix checks.
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Bell measurement bases.
    #[command(subcommand)]
    Bell(BellCmd),
    /// Run the teleportation protocol.
    #[command(subcommand)]
    Teleport(TeleportCmd),
    /// Anticommuting Pauli sets and magic partial bases.
    #[command(subcommand)]
    Magic(MagicCmd),
    /// Minimum assured fidelity of a one-qubit channel, against 2C/(1+C).
    Masfi(MasfiArgs),
}

#[derive(Debug, Subcommand)]
pub enum ChannelCmd {
    /// Check the perfect-channel condition E†E = 2⁻ⁿ·1 for the reshaped
    /// 2n-qubit state E. Exits 1 when it fails.
    Check {
        /// State file of the 2n-qubit channel.
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum BellCmd {
    /// Generate the basis B^(α) = σ^(α)·B^(0) from a seed state and check
    /// orthonormality and completeness Σ_α B_ij B*_kl = δ_ik δ_jl.
    Gen {
        /// Number of information qubits (seed is the Bell-pair product when no
        /// seed file is given).
        #[arg(long)]
        n: Option<usize>,
        /// State file of a maximally entangled 2n-qubit seed.
        #[arg(long)]
        seed_file: Option<PathBuf>,
        /// Write the basis as a JSON array of matrices.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Subcommand)]
pub enum TeleportCmd {
    /// Teleport an n-qubit state: Bob holds O^(α)·|I⟩ with O^(α) = Eᵀ B^(α)†
    /// and applies U^(α) = 2ⁿ B^(α) E* when the channel is perfect.
    Run(TeleportArgs),
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    /// State file of the n-qubit information state.
    #[arg(long)]
    pub info: PathBuf,
    /// State file of the 2n-qubit channel.
    #[arg(long)]
    pub channel: PathBuf,
    /// Basis file (JSON array of matrices).
    #[arg(long, conflicts_with = "n")]
    pub basis: Option<PathBuf>,
    /// Use the standard Pauli basis on n qubits.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    /// Number of simulated measurements in sampled mode.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exit 1 unless the channel is perfect and every outcome has fidelity 1.
    #[arg(long)]
    pub expect_perfect: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhasesArg {
    Global,
    Independent,
}

#[derive(Debug, Subcommand)]
pub enum MagicCmd {
    /// Enumerate maximal sets of mutually anticommuting Pauli strings
    /// (maximal cliques of the anticommutation graph).
    Cliques {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=3))]
        n: u64,
        /// List every maximal set, not only the largest.
        #[arg(long)]
        all: bool,
    },
    /// The sixteen named two-qubit states ½·m, compared with their listed
    /// amplitudes, plus reconciliation of listed anticommuting sets.
    Catalog,
    /// Verify that combinations Σ c_l m̃_l of a partial basis
    /// {2^{-n/2}·1, 2^{-n/2}·i·M_l} satisfy M̃†M̃ = 2⁻ⁿ·1.
    Verify {
        /// Anticommuting set: catalog names, quaternary indices or Pauli
        /// strings, comma separated. Defaults to every largest set.
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=3))]
        n: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PhasesArg::Global)]
        phases: PhasesArg,
    },
    /// Compare the largest mutually anticommuting set with the 4ⁿ−1 strings a
    /// full magic basis needs, and test the GHZ channel against every largest
    /// partial basis.
    Witness {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=3))]
        n: u64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MasfiSource {
    /// Channel √λ|00⟩ + √(1−λ)|11⟩.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// State file of a two-qubit channel.
    #[arg(long)]
    pub channel: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MasfiArgs {
    #[command(flatten)]
    pub source: MasfiSource,
    /// Exit 1 when the minimum differs from 2C/(1+C) by more than this.
    #[arg(long)]
    pub expect_closed_form: Option<f64>,
}
