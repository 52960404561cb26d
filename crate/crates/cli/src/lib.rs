//! Command-line front end of `lilbound`: conjugates, norms, tail bounds
//! and their Monte Carlo verification.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunArgs;
pub use error::{code, CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "lilbound", version, about = "Exponential tail bounds for normalized martingale maxima")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Young-Fenchel conjugate of a generator on a u grid.
    Conjugate {
        /// Generator id, see `lilbound models`.
        #[arg(long)]
        phi: String,
        /// u grid: a,b,c or lin:LO:HI:N or log:LO:HI:N.
        #[arg(long = "u")]
        u_grid: String,
        /// Print JSON instead of CSV.
        #[arg(long)]
        json: bool,
        /// Also write conjugate.csv and conjugate.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// B(phi) and G(psi) norms of a one-column CSV sample.
    Norm {
        /// One-column CSV of centered observations.
        #[arg(long)]
        sample: PathBuf,
        /// Generator id for the B(phi) norm.
        #[arg(long, default_value = "phi2")]
        phi: String,
        /// Also write norm.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimized block-sum bound over the u grid.
    Bound(RunArgs),
    /// Sup-tail estimate only.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Enumerate all sign paths instead of sampling.
        #[arg(long)]
        exact: bool,
    },
    /// Tail estimate, calibration of C and the lower/upper sandwich.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Enumerate all sign paths instead of sampling.
        #[arg(long)]
        exact: bool,
    },
    /// List registered ids.
    Models {
        /// Print JSON instead of a plain list.
        #[arg(long)]
        json: bool,
    },
}

/// Worker count from `LILBOUND_THREADS`; 0 (or unset) means one per core.
pub fn threads_from_env() -> CliResult<usize> {
    let Ok(raw) = std::env::var("LILBOUND_THREADS") else {
        return Ok(0);
    };
    raw.trim()
        .parse()
        .map_err(|_| CliError::domain(format!("LILBOUND_THREADS must be a non-negative integer, got {raw:?}")))
}

/// Runs one subcommand on a pool of `threads` workers (0: one per core).
pub fn run(cli: Cli, threads: usize) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::new(code::IO, format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Conjugate { phi, u_grid, json, out } => commands::conjugate(&phi, &u_grid, json, out.as_deref()),
        Command::Norm { sample, phi, out } => commands::norm(&sample, &phi, out.as_deref()),
        Command::Bound(args) => commands::bound(&args),
        Command::Simulate { run, exact } => commands::simulate(&run, exact),
        Command::Verify { run, exact } => commands::verify(&run, exact),
        Command::Models { json } => commands::models(json),
    }
}
