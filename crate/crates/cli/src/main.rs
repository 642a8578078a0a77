use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shadowrec_cli::config::{load_config, seed_override, Instance, SEED_ENV};
use shadowrec_cli::error::{CliError, EXIT_FAILURE};
use shadowrec_cli::output::write_file;
use shadowrec_cli::{audit, hull, parse_grid, shadow, verify};

#[derive(Debug, Parser)]
#[command(name = "shadowrec", version, about = "Shadow orbits for perturbed linear recurrences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a pseudo-orbit, build its shadow and write CSV and JSON reports.
    Shadow {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the shadowing invariants over many random pseudo-orbits.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: usize,
    },
    /// Scan exact starts of x_{n+1} = r x_n + 1 for bounded distance to the pseudo-orbit.
    Audit {
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        /// lo:hi:step
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        horizon: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance of query points to the balanced convex hull of a set.
    Hull {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn instance(path: &Path) -> Result<Instance, CliError> {
    let mut inst = load_config(path)?.validate()?;
    inst.seed = seed_override(inst.seed, std::env::var(SEED_ENV).ok())?;
    Ok(inst)
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, bytes),
        None => std::io::stdout().lock().write_all(bytes).map_err(|e| CliError::io("writing stdout", e)),
    }
}

fn execute(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Shadow { config, out } => {
            let inst = instance(&config)?;
            let run = shadow::run(&inst)?;
            let (csv, summary) = shadow::write_outputs(&inst, &run, &out)?;
            let r = &run.result;
            println!("regime: {} ({})", run.regime.regime, r.variant.name());
            println!("resolved horizon: {} of {}", r.resolved_horizon(), inst.horizon);
            println!("stability constant: {:e}", r.stability_constant);
            println!("guaranteed containment failures: {}", r.failures().len());
            println!("defects outside V: {}", run.pseudo.violations().len());
            println!("wrote {} and {}", csv.display(), summary.display());
            Ok(run.passed())
        }
        Command::Verify { config, trials } => {
            let inst = instance(&config)?;
            let summary = verify::run(&inst, trials)?;
            for line in summary.lines() {
                println!("{line}");
            }
            Ok(summary.all_passed())
        }
        Command::Audit { r, grid, horizon, out } => {
            let report = audit::run(r, parse_grid(&grid)?, horizon)?;
            emit(&audit::csv_bytes(&report)?, out.as_deref())?;
            std::io::stderr()
                .lock()
                .write_all(&audit::summary_bytes(&report))
                .map_err(|e| CliError::io("writing stderr", e))?;
            Ok(true)
        }
        Command::Hull { set, queries, out } => {
            let (h, q) = hull::load(&set, &queries)?;
            emit(&hull::csv_bytes(&h, &q)?, out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
