//! `specobs`: meshes, solves and sweeps a disk with a rotating obstacle.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or
//! validation error, 3 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("numerical failure: {0}")]
    Numerical(specobs::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<specobs::Error> for CliError {
    fn from(e: specobs::Error) -> Self {
        use specobs::Error as E;
        let root = match &e {
            E::AtSample { source, .. } => source.as_ref(),
            other => other,
        };
        match root {
            E::InvalidDomain(_) | E::InvalidParameter(_) => CliError::Config(e.to_string()),
            E::Io(m) => CliError::Output(m.clone()),
            _ => CliError::Numerical(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "specobs", version, about = "Principal eigenvalue of a disk with a rotating obstacle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Run configuration (TOML, or JSON by extension).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent solves.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Mesh seed; 0 is the canonical mesh.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single solve at the configured (or given) rotation angle.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Sweep over the configured grid, with verdicts.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Full property suite with derivatives and cross-checks.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Uniform refinement study.
    Convergence {
        #[command(flatten)]
        common: Common,
    },
    /// Writes the mesh at the given angle.
    MeshExport {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: Option<f64>,
    },
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("SPECOBS_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Solve { common, .. }
        | Command::Sweep { common }
        | Command::Verify { common }
        | Command::Convergence { common }
        | Command::MeshExport { common, .. } => common.clone(),
    };
    let mut cfg = config::RunConfig::load(&common.config)?;
    if let Some(out) = &common.out {
        cfg.output.directory = out.clone();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Solve { t, .. } => commands::solve(&cfg, t, common.seed),
        Command::Sweep { .. } => commands::sweep(&cfg, common.seed),
        Command::Verify { .. } => commands::verify(&cfg, common.seed),
        Command::Convergence { .. } => commands::convergence(&cfg),
        Command::MeshExport { t, .. } => commands::mesh_export(&cfg, t, common.seed),
    })
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("specobs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
