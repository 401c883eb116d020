use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use fluxshot::{report, sweep, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "fluxshot", version, about = "Fluxonium dispersive-readout simulator and analysis runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a scenario file.
    Run {
        config: PathBuf,
        /// Also write SVG plots next to the CSV files.
        #[arg(long)]
        svg: bool,
    },
    /// Repeat the scenario's single-shot or QND pipeline along one axis.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: String,
        /// Comma-separated ascending values.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        svg: bool,
    },
    /// Verify and merge every run found under a directory.
    Report { dir: PathBuf },
    /// Check a scenario file without running it.
    Validate { config: PathBuf },
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("FLUXSHOT_THREADS") {
        let n: usize = value
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Validation(format!("FLUXSHOT_THREADS must be a positive integer, got `{value}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker pool")?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Run { config, svg } => {
            let dir = fluxshot::run_config(&config, svg)?;
            println!("{}", dir.display());
        }
        Command::Sweep { config, axis, grid, svg } => {
            let axis: sweep::Axis = axis.parse()?;
            let grid = sweep::parse_grid(&grid)?;
            let (dir, warnings) = fluxshot::sweep_config(&config, axis, &grid, svg)?;
            if warnings > 0 {
                eprintln!("{warnings} grid point(s) failed and were recorded as NaN");
            }
            println!("{}", dir.display());
        }
        Command::Report { dir } => {
            let summary = report::report(&dir)?;
            print!("{}", report::render_markdown(&summary));
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            println!("ok: {} scenario, hash {}", cfg.experiment.name(), cfg.short_hash());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
