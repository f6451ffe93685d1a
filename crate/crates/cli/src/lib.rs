//! `hplus`: batch front end for the disc-sequence library.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use hplus_core::interp::DEFAULT_TOLERANCE;
use hplus_core::measure::GridSpec;

pub mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod svg;

use error::{CliError, CliResult};
use output::{OutputDir, RunReport};

#[derive(Parser, Debug)]
#[command(name = "hplus", version, about = "Interpolating sequences for positive harmonic functions")]
pub struct Cli {
    /// Uniform boundary grid resolution.
    #[arg(long, global = true, default_value_t = 4096)]
    pub grid: usize,
    /// LP feasibility tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for CSV, SVG and JSON outputs.
    #[arg(long, global = true, default_value = "hplus-out")]
    pub out: PathBuf,
    /// Print the run report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the density conditions, separation and the Carleson condition.
    Classify {
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long = "m", default_value_t = 8.0)]
        m_const: f64,
        /// Also fit the smallest constants on a grid of exponents.
        #[arg(long)]
        fit: bool,
    },
    /// Interpolate positive values by a positive harmonic function.
    Solve {
        input: PathBuf,
        /// JSON array of target values; generated from --epsilon and --seed when absent.
        #[arg(long)]
        values: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Build the boundary sets G_n and assemble an interpolant from them.
    Construct {
        input: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Density constant; fitted at --alpha when absent.
        #[arg(long = "m")]
        m_const: Option<f64>,
        /// JSON array of "T"/"S"; alternating when absent.
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Compatibility parameter for generated values; min(eta, 0.02)/2 when absent.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        values: Option<PathBuf>,
    },
    /// Radial projections of superlevel sets.
    Probe {
        /// Sequence whose seeded interpolant is probed.
        input: Option<PathBuf>,
        /// JSON {"atoms": [[theta, mass], ...]} or {"steps": [[start, end, density], ...]}.
        #[arg(long, conflicts_with = "input")]
        measure: Option<PathBuf>,
        /// Probe this many random measures instead.
        #[arg(long, conflicts_with_all = ["input", "measure"])]
        random: Option<usize>,
        /// Atoms per random measure.
        #[arg(long, default_value_t = 10)]
        atoms: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64")]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = hplus_core::necessity::DEFAULT_RAYS)]
        rays: usize,
        #[arg(long, default_value_t = hplus_core::necessity::DEFAULT_RADIAL)]
        radial: usize,
    },
    /// Write a generated sequence file.
    Gallery {
        name: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long, default_value_t = 2)]
        spread: u32,
        #[arg(long, default_value_t = 2)]
        levels: u32,
    },
}

/// Settings shared by every command.
pub struct Context {
    pub grid: GridSpec,
    pub tolerance: f64,
    pub seed: u64,
    pub out: OutputDir,
}

pub fn run(cli: &Cli, argv: Vec<String>) -> CliResult<RunReport> {
    let grid = GridSpec::new(cli.grid, GridSpec::default().refinement).map_err(CliError::from)?;
    let ctx = Context {
        grid,
        tolerance: cli.tolerance,
        seed: cli.seed,
        out: OutputDir::new(&cli.out)?,
    };
    let mut report = RunReport::new(argv);
    report.param("grid", cli.grid);
    report.param("tolerance", cli.tolerance);
    report.param("seed", cli.seed);
    match &cli.command {
        Command::Classify {
            input,
            alpha,
            m_const,
            fit,
        } => commands::classify(&ctx, &mut report, input, *alpha, *m_const, *fit)?,
        Command::Solve { input, values, epsilon } => {
            commands::solve(&ctx, &mut report, input, values.as_deref(), *epsilon)?
        }
        Command::Construct {
            input,
            delta,
            alpha,
            m_const,
            partition,
            epsilon,
            values,
        } => commands::construct(
            &ctx,
            &mut report,
            &commands::ConstructArgs {
                input,
                delta: *delta,
                alpha: *alpha,
                m_const: *m_const,
                partition: partition.as_deref(),
                epsilon: *epsilon,
                values: values.as_deref(),
            },
        )?,
        Command::Probe {
            input,
            measure,
            random,
            atoms,
            epsilon,
            lambdas,
            rays,
            radial,
        } => {
            let source = match (input, measure, random) {
                (Some(p), None, None) => commands::ProbeSource::Sequence(p, *epsilon),
                (None, Some(p), None) => commands::ProbeSource::Measure(p),
                (None, None, Some(n)) => commands::ProbeSource::Random(*n, *atoms),
                _ => return Err(CliError::input("probe needs one of INPUT, --measure or --random")),
            };
            commands::probe(&ctx, &mut report, source, lambdas, *rays, *radial)?
        }
        Command::Gallery {
            name,
            depth,
            spread,
            levels,
        } => commands::gallery(&ctx, &mut report, name, *depth, *spread, *levels)?,
    }
    Ok(report)
}
