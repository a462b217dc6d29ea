//! `wigsim`: run phase-space slit-bench scenarios from plain-text
//! files, emit the built-in figure data set, or run the validation
//! checks.
//!
//! Exit codes: 0 success, 1 runtime/IO failure, 2 scenario parse error,
//! 3 grid clipping (a state reached the lattice boundary). Failures
//! print a machine-readable `key = value` record to stderr.

use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod figures;
mod output;
mod scenario_file;

use scenario_file::{parse_scenario, ParseError, ScenarioFile};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const OUT_DIR_ENV: &str = "WIGSIM_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "wigsim",
    version,
    about = "One-dimensional phase-space slit-bench simulator",
    long_about = "Computes phase-space quasi-probability maps of slit-bench states, applies \
                  filtering, detection, and free-space propagation, and writes plottable \
                  delimited-text tables. Output directory resolution: --out flag, then the \
                  scenario's [output] directory, then $WIGSIM_OUT_DIR, then ./wigsim-out."
)]
struct Cli {
    /// Override the scenario grid size (even integer >= 4)
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Override the scenario grid extent, in slit-width units
    #[arg(long, global = true)]
    grid_extent: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its output bundle
    Run {
        /// Path to the scenario file
        scenario: PathBuf,
        /// Output directory for the bundle
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the built-in figure reproduction data set
    Figures {
        /// Output directory for the figure tables
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the validation checks and print pass/fail per property
    Validate {
        /// Use reduced lattices (same tolerances)
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Parse(ParseError),
    Core(wigsim::Error),
    Io(io::Error),
    Validation { failed: usize },
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl From<wigsim::Error> for CliError {
    fn from(e: wigsim::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(wigsim::Error::EnvelopeClipped { .. }) => 3,
            CliError::Core(_) => 1,
            CliError::Io(_) => 1,
            CliError::Validation { .. } => 1,
        }
    }

    fn report(&self) {
        match self {
            CliError::Parse(e) => {
                eprintln!("error_kind = parse");
                if e.line > 0 {
                    eprintln!("line = {}", e.line);
                }
                eprintln!("message = {}", e.message);
            }
            CliError::Core(e) => {
                let kind = if matches!(e, wigsim::Error::EnvelopeClipped { .. }) {
                    "clipping"
                } else {
                    "runtime"
                };
                eprintln!("error_kind = {kind}");
                eprintln!("message = {e}");
            }
            CliError::Io(e) => {
                eprintln!("error_kind = io");
                eprintln!("message = {e}");
            }
            CliError::Validation { failed } => {
                eprintln!("error_kind = validation");
                eprintln!("message = {failed} validation checks failed");
            }
        }
    }
}

fn resolve_out_dir(flag: Option<PathBuf>, scenario_dir: Option<&str>) -> PathBuf {
    if let Some(dir) = flag {
        return dir;
    }
    if let Some(dir) = scenario_dir {
        return PathBuf::from(dir);
    }
    if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from("wigsim-out")
}

fn apply_grid_overrides(file: &mut ScenarioFile, grid_n: Option<usize>, grid_extent: Option<f64>) {
    if let Some(n) = grid_n {
        file.spec.grid.n = n;
    }
    if let Some(extent) = grid_extent {
        file.spec.grid.extent = extent;
    }
}

fn cmd_run(
    scenario_path: &Path,
    out: Option<PathBuf>,
    grid_n: Option<usize>,
    grid_extent: Option<f64>,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(scenario_path)?;
    let mut file = parse_scenario(&text)?;
    apply_grid_overrides(&mut file, grid_n, grid_extent);
    let dir = resolve_out_dir(out, file.output.directory.as_deref());

    let result = wigsim::scenarios::run_scenario(&file.spec)?;
    for warning in &result.warnings {
        eprintln!("warning: {warning}");
    }
    output::write_run_bundle(&dir, &file, &result, VERSION)?;

    for plane in &result.planes {
        println!(
            "plane tau={}: visibility_q={:.4} visibility_p={:.4} interference_energy={:.4} passed={:.4}",
            plane.tau,
            plane.visibility_q.value,
            plane.visibility_p.value,
            plane.interference_energy,
            plane.passed_fraction,
        );
    }
    println!("bundle written to {}", dir.display());
    Ok(())
}

fn cmd_figures(
    out: Option<PathBuf>,
    grid_n: Option<usize>,
    grid_extent: Option<f64>,
) -> Result<(), CliError> {
    let mut grid = figures::default_grid();
    if let Some(n) = grid_n {
        grid.n = n;
    }
    if let Some(extent) = grid_extent {
        grid.extent = extent;
    }
    let dir = resolve_out_dir(out, None);
    figures::write_figures(&dir, &grid)?;
    println!("figure data written to {}", dir.display());
    Ok(())
}

fn cmd_validate(quick: bool) -> Result<(), CliError> {
    use wigsim::validation::{run_all, Scale};
    let scale = if quick { Scale::Quick } else { Scale::Desk };
    let outcomes = run_all(scale);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    for outcome in &outcomes {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:<26} {}", outcome.name, outcome.detail);
    }
    if failed > 0 {
        return Err(CliError::Validation { failed });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, out } => cmd_run(&scenario, out, cli.grid_n, cli.grid_extent),
        Command::Figures { out } => cmd_figures(out, cli.grid_n, cli.grid_extent),
        Command::Validate { quick } => cmd_validate(quick),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.report();
            ExitCode::from(e.exit_code())
        }
    }
}
