use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qdiscord::phase_space::GridGeometry;
use qdiscord::Subsystem;
use qdiscord_cli::commands::{self, GaussianDecision, Input, PovmChoice};
use qdiscord_cli::format::{emit, StateFile};
use qdiscord_cli::{CliError, CliResult};

/// Verify nonzero quantum discord from state files. Reports go to stdout or
/// --out; the exit status is 0 whatever the verdict and 2 on any error.
#[derive(Parser)]
#[command(name = "qdiscord", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact commutativity test on a bipartite density matrix.
    VerifyDv {
        state: PathBuf,
        #[arg(long, default_value = "default")]
        povm: PovmChoice,
        #[arg(long, default_value_t = 0)]
        povm_seed: u64,
        #[arg(long, default_value_t = qdiscord::dv::DEFAULT_COMMUTATOR_THRESHOLD)]
        threshold: f64,
        /// Subsystem receiving the IC measurement (a or b).
        #[arg(long, default_value = "a")]
        measure: String,
    },
    /// Heterodyne peak test on a two-mode Gaussian state.
    VerifyGaussian {
        state: PathBuf,
        /// Two heterodyne outcomes as "x1,p1;x1',p1'".
        #[arg(long, default_value = "0,0;1,1")]
        outcomes: String,
        #[arg(long, default_value_t = qdiscord::gaussian::DEFAULT_DECISION_TOLERANCE)]
        tol: f64,
        /// peak or cov.
        #[arg(long, default_value = "peak")]
        decision: GaussianDecision,
    },
    /// Moyal-bracket commutator of two single-mode states.
    Moyal {
        state_a: PathBuf,
        state_b: PathBuf,
        /// Half-width of the square grid used for Fock-basis inputs.
        #[arg(long, default_value_t = 6.0)]
        half_width: f64,
        /// Points per axis for Fock-basis inputs.
        #[arg(long, default_value_t = 128)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        #[arg(long, default_value_t = qdiscord::tomo::DEFAULT_Z_THRESHOLD)]
        z: f64,
        /// Write the commutator grid here.
        #[arg(long)]
        grid_out: Option<PathBuf>,
    },
    /// Finite-shot tomography with a significance-tagged verdict.
    Tomo {
        state: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = qdiscord::tomo::DEFAULT_Z_THRESHOLD)]
        z: f64,
        #[arg(long, default_value_t = qdiscord::tomo::DEFAULT_BOOTSTRAP_RESAMPLES)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0)]
        povm_seed: u64,
        /// Write the shot record here for replay.
        #[arg(long)]
        record_out: Option<PathBuf>,
    },
}

fn write_file(path: &PathBuf, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })
}

fn run(cli: Cli) -> CliResult<String> {
    let report = match cli.command {
        Command::VerifyDv { state, povm, povm_seed, threshold, measure } => {
            let measured = match measure.as_str() {
                "a" | "A" => Subsystem::A,
                "b" | "B" => Subsystem::B,
                _ => return Err(CliError::Usage(format!("--measure must be a or b, got {measure:?}"))),
            };
            let opts = commands::DvOptions { povm, povm_seed, threshold, measured };
            commands::verify_dv(&Input::load(&state)?, &opts)?
        }
        Command::VerifyGaussian { state, outcomes, tol, decision } => {
            let opts = commands::GaussianOptions { outcomes: commands::parse_outcomes(&outcomes)?, tol, decision };
            commands::verify_gaussian(&Input::load(&state)?, &opts)?
        }
        Command::Moyal { state_a, state_b, half_width, points, threshold, z, grid_out } => {
            let geometry = GridGeometry::new(-half_width, half_width, -half_width, half_width, points, points)?;
            let opts = commands::MoyalOptions { geometry, threshold, z_threshold: z };
            let (report, grid) = commands::moyal(&Input::load(&state_a)?, &Input::load(&state_b)?, &opts)?;
            if let Some(path) = grid_out {
                write_file(&path, &emit(&StateFile::Grid(grid)))?;
            }
            report
        }
        Command::Tomo { state, shots, seed, z, bootstrap, povm_seed, record_out } => {
            let opts = commands::TomoOptions { shots, seed, z_threshold: z, bootstrap_resamples: bootstrap, povm_seed };
            let (report, record) = commands::tomo(&Input::load(&state)?, &opts)?;
            if let Some(path) = record_out {
                write_file(&path, &emit(&StateFile::Shots(record)))?;
            }
            report
        }
    };
    let text = report.to_json();
    match cli.out {
        Some(path) => {
            write_file(&path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qdiscord: {e}");
            ExitCode::from(2)
        }
    }
}
