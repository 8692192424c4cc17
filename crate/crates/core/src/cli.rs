//! Command-line front end: scenario files, runners and CSV output.
//!
//! Exit codes: `0` on success, `2` for configuration errors, `3` for
//! numerical failures.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

pub mod config;
mod run;

pub use config::{parse_float_list, parse_value, Scenario, Seeds, SweepGrid, Task, Value, WeightSpec};
pub use run::{failure_code, run_scenario, Report, RunOptions, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nerve-orbits", version, about = "Periodic and subharmonic orbits of nerve fiber equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Scenario file; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory for CSV files (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Relative integrator tolerance (overrides `tol.rel`).
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_rel: Option<f64>,

    /// Absolute integrator tolerance (overrides `tol.abs`).
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_abs: Option<f64>,

    /// Sampling step of exported trajectories.
    #[arg(long, global = true, value_name = "DT")]
    pub dt_out: Option<f64>,

    /// Seed grid as `A`, `AxR` or `AxRxP` (angular, radial, phases).
    #[arg(long, global = true, value_name = "GRID")]
    pub seeds: Option<String>,

    /// Only report errors.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orbit segments through (x0, 0) over [-T, T] and the curves g s, n F(s).
    Portrait,
    /// Time map and period bound over a grid of n̄.
    Timemap {
        /// Comma-separated n̄ values (overrides `timemap.nbar_grid`).
        #[arg(long, value_name = "LIST")]
        nbar_grid: Option<String>,
    },
    /// Rotation numbers of the configured initial points.
    Rotation,
    /// Radius of a circle on which every sampled rotation number is small.
    OuterRadius,
    /// Twist certificate and fixed points of the period map.
    FindOrbits {
        /// Also write every orbit over one period as CSV.
        #[arg(long, value_name = "DIR")]
        emit_orbits: Option<PathBuf>,
    },
    /// Subharmonics with rotation numbers co-prime to m.
    Subharmonics {
        #[arg(long, value_name = "DIR")]
        emit_orbits: Option<PathBuf>,
    },
    /// Multiplicity sweep over two-level weights.
    Sweep,
}

impl Command {
    pub fn task(&self) -> Task {
        match self {
            Command::Portrait => Task::Portrait,
            Command::Timemap { .. } => Task::Timemap,
            Command::Rotation => Task::Rotation,
            Command::OuterRadius => Task::OuterRadius,
            Command::FindOrbits { .. } => Task::FindOrbits,
            Command::Subharmonics { .. } => Task::Subharmonics,
            Command::Sweep => Task::Sweep,
        }
    }

    fn emit_dir(&self) -> Option<&Path> {
        match self {
            Command::FindOrbits { emit_orbits } | Command::Subharmonics { emit_orbits } => emit_orbits.as_deref(),
            _ => None,
        }
    }
}

/// Reads the scenario and applies command-line overrides.
pub fn load_scenario(cli: &Cli) -> Result<Scenario> {
    let mut sc = match &cli.common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
            Scenario::parse(&text)?
        }
        None => Scenario::default(),
    };
    let c = &cli.common;
    if let Some(dir) = &c.out {
        sc.out_dir = dir.clone();
    }
    if let Some(v) = c.tol_rel {
        sc.tol.rel_tol = v;
    }
    if let Some(v) = c.tol_abs {
        sc.tol.abs_tol = v;
    }
    if let Some(v) = c.dt_out {
        sc.dt_out = v;
    }
    if let Some(s) = &c.seeds {
        sc.seeds = s.parse()?;
    }
    if let Command::Timemap { nbar_grid: Some(list) } = &cli.command {
        sc.timemap_nbar = parse_float_list(list).map_err(|e| match e {
            Error::Config { reason, .. } => Error::config("--nbar-grid", reason),
            other => other,
        })?;
    }
    sc.validate()?;
    Ok(sc)
}

/// Writes the report's tables; trajectory tables go to `emit_dir` when given.
pub fn write_report(report: &Report, out_dir: &Path, emit_dir: Option<&Path>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    if let Some(dir) = emit_dir {
        fs::create_dir_all(dir)?;
    }
    let mut written = Vec::with_capacity(report.tables.len());
    for table in &report.tables {
        let dir = match emit_dir {
            Some(dir) if table.file.starts_with("orbit_") => dir,
            _ => out_dir,
        };
        let path = dir.join(&table.file);
        fs::write(&path, table.to_csv())?;
        written.push(path);
    }
    Ok(written)
}

/// Runs one command end to end and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let sc = load_scenario(cli)?;
    let emit_dir = cli.command.emit_dir();
    let opts = RunOptions {
        emit_orbits: emit_dir.is_some(),
    };
    let report = run_scenario(&sc, cli.command.task(), opts)?;
    let written = write_report(&report, &sc.out_dir, emit_dir)?;
    if !cli.common.quiet {
        // a closed pipe on stdout is not worth failing the run over
        let _ = print_summary(&report, &written);
    }
    Ok(())
}

fn print_summary(report: &Report, written: &[PathBuf]) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    for line in &report.summary {
        writeln!(out, "{line}")?;
    }
    for table in report.tables.iter().filter(|t| t.echo) {
        out.write_all(table.to_csv().as_bytes())?;
    }
    for path in written {
        writeln!(out, "wrote {}", path.display())?;
    }
    out.flush()
}
