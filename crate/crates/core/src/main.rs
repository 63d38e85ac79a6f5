//! `entcost` — entanglement measures and entanglement-breaking
//! certificates for small bipartite states.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use entcost::cli::{
    cmd_additivity, cmd_bell_mix, cmd_eb, cmd_ef, cmd_example, exit_code_for, EbInput, EfArgs,
    OutputFormat,
};

#[derive(Parser)]
#[command(
    name = "entcost",
    version,
    about = "Entanglement cost, formation and distillation values for small bipartite states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cost/distillation/formation table for the two-component Bell mixture.
    BellMix {
        /// Single mixing weight in [0, 1/2].
        #[arg(long, conflicts_with = "grid")]
        p: Option<f64>,
        /// Number of grid points on [0, 1/2] (default 101).
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Report on one of the four reference subspaces.
    Example {
        /// Subspace id, 1 through 4.
        #[arg(long)]
        id: u8,
        /// Random states sampled by the constant-entanglement check.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Variational formation bound for a density matrix from a JSON file.
    Ef {
        /// Path to the state document.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        opt: OptFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Additivity gap for a pair of Bell mixtures.
    Additivity {
        /// First mixing weight in [0, 1/2].
        #[arg(long)]
        p: f64,
        /// Second mixing weight in [0, 1/2].
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        opt: OptFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Entanglement-breaking certificate for a reference subspace or a
    /// Choi state from a JSON file.
    EbCheck {
        /// Reference subspace id, 1 through 4.
        #[arg(long, conflicts_with = "choi")]
        example: Option<u8>,
        /// Path to a Choi state document (dims = input x output).
        #[arg(long)]
        choi: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every random draw of the command.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Args)]
struct OptFlags {
    /// Ensemble size (default: rank squared).
    #[arg(long)]
    ensemble_size: Option<usize>,
    /// Number of optimizer restarts.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Iteration cap per restart.
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    /// Step-length stopping tolerance.
    #[arg(long, default_value_t = 1e-9)]
    step_tol: f64,
    /// Value-progress stopping tolerance.
    #[arg(long, default_value_t = 1e-9)]
    value_tol: f64,
}

impl From<&OptFlags> for EfArgs {
    fn from(f: &OptFlags) -> Self {
        Self {
            ensemble_size: f.ensemble_size,
            restarts: f.restarts,
            max_iters: f.max_iters,
            step_tol: f.step_tol,
            value_tol: f.value_tol,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();

    let (result, common) = match &cli.command {
        Command::BellMix { p, grid, common } => {
            (cmd_bell_mix(*p, *grid, common.seed).map(|r| (r, 0)), common)
        }
        Command::Example {
            id,
            samples,
            common,
        } => (
            cmd_example(*id, *samples, common.seed).map(|r| (r, 0)),
            common,
        ),
        Command::Ef { input, opt, common } => (
            cmd_ef(input, &EfArgs::from(opt), common.seed).map(|r| (r, 0)),
            common,
        ),
        Command::Additivity { p, q, opt, common } => (
            cmd_additivity(*p, *q, &EfArgs::from(opt), common.seed).map(|r| (r, 0)),
            common,
        ),
        Command::EbCheck {
            example,
            choi,
            common,
        } => {
            let input = match (example, choi) {
                (Some(id), None) => EbInput::Example(*id),
                (None, Some(path)) => EbInput::ChoiFile(path.clone()),
                _ => {
                    eprintln!("error: eb-check needs exactly one of --example or --choi");
                    return ExitCode::from(2);
                }
            };
            (cmd_eb(&input, common.seed), common)
        }
    };

    match result {
        Ok((mut report, code)) => {
            report.wall_time = started.elapsed().as_secs_f64();
            let text = report.render(common.format.into());
            if let Some(path) = &common.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            eprintln!("# wall_time_s={:.6}", report.wall_time);
            ExitCode::from(u8::try_from(code).unwrap_or(1))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(exit_code_for(&e)).unwrap_or(1))
        }
    }
}
