use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use loopforms_cli::{coefficient_table, emit_report, run_suite, Format, RunConfig, Suite};

#[derive(Parser)]
#[command(name = "loopforms", version, about = "Seeded numerical verification of loop-group form identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and emit its report.
    Verify {
        #[arg(long)]
        suite: Option<Suite>,
        /// Json file with any RunConfig fields; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed for all random data; LOOPFORMS_SEED replaces the built-in default.
        #[arg(long)]
        seed: Option<u64>,
        /// n in SU(n).
        #[arg(long)]
        n: Option<usize>,
        /// Loop sample count N.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value = "text")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print an exact table.
    Table {
        #[command(subcommand)]
        table: Table,
    },
}

#[derive(Subcommand)]
enum Table {
    /// The transgression coefficient identity for k = 1..=kmax.
    Coefficients {
        #[arg(long, default_value_t = 20)]
        kmax: usize,
    },
}

fn base_config() -> Result<RunConfig> {
    let mut config = RunConfig::default();
    if let Ok(seed) = std::env::var("LOOPFORMS_SEED") {
        config.seed = seed.trim().parse().with_context(|| format!("LOOPFORMS_SEED is not a 64-bit seed: {seed:?}"))?;
    }
    Ok(config)
}

/// Returns whether every check passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { suite, config, seed, n, samples, step, format, out } => {
            let mut run_config = base_config()?;
            if let Some(path) = config {
                let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                run_config = run_config.merged_with_json(&text).with_context(|| format!("parsing {}", path.display()))?;
            }
            run_config.suite = suite.unwrap_or(run_config.suite);
            run_config.seed = seed.unwrap_or(run_config.seed);
            run_config.rank = n.unwrap_or(run_config.rank);
            run_config.samples = samples.or(run_config.samples);
            run_config.fd_step = step.unwrap_or(run_config.fd_step);

            let report = run_suite(&run_config)?;
            let text = emit_report(&report, format)?;
            match out {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(report.all_passed())
        }
        Command::Table { table: Table::Coefficients { kmax } } => {
            print!("{}", coefficient_table(kmax)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
