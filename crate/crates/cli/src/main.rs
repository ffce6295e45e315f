//! `slowfast`: command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input or usage, 3 numerical failure,
//! 1 I/O failure.

// `!(x > 0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Worker-thread count for sample-parallel work.
pub const WORKERS_ENV: &str = "SLOWFAST_WORKERS";

#[derive(Parser)]
#[command(name = "slowfast", version, about = "Slow-fast ODE analysis: manifolds, monotonicity, census, limit cycles")]
pub struct Cli {
    /// Omit the timestamp field from JSON reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone)]
pub struct ModelArgs {
    /// futile-cycle, futile-cycle-reduced, futile-cycle-mass-action or counterexample
    #[arg(long)]
    pub model: Option<String>,
    /// JSON parameter file {"model", "params", "eps"}.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Timescale ratio; overrides the parameter file.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Clone, Copy)]
pub struct TolArgs {
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Dp45,
    Ros23,
    Ros4,
}

#[derive(Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionArg {
    Up,
    Down,
    Both,
}

#[derive(Subcommand)]
pub enum Command {
    /// Integrate one trajectory and write it as CSV.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Final time (slow time; τ for the mass-action model).
        #[arg(long)]
        t_end: Option<f64>,
        /// Initial state, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        initial: Option<Vec<f64>>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Number of equally spaced output times (default: every step).
        #[arg(long)]
        points: Option<usize>,
    },
    /// Find and classify equilibria.
    Equilibria {
        #[command(flatten)]
        model: ModelArgs,
        /// Scan resolution (cells per side; grid points for scalar scans).
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Seeded convergence census over the invariant domain.
    Census {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Slow-time horizon per sample.
        #[arg(long, default_value_t = 200.0)]
        horizon: f64,
        /// Field-norm convergence threshold.
        #[arg(long, default_value_t = 1e-6)]
        tol_field: f64,
    },
    /// Distance of relaxed trajectories from the critical manifold versus eps.
    ManifoldError {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001,0.0001")]
        eps_list: Vec<f64>,
        /// Slow sample grid size.
        #[arg(long, default_value_t = 6)]
        grid: usize,
    },
    /// Decay of the distance to the slow manifold after an off-manifold start.
    PhaseTrack {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Slow starting point, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        displacement: f64,
        /// 1-based fast component that is displaced.
        #[arg(long, default_value_t = 1)]
        component: usize,
        /// Order of the reference manifold.
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        /// The run lasts tau_factor/mu in fast time.
        #[arg(long, default_value_t = 40.0)]
        tau_factor: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Kamke condition, eventually positive derivatives and order preservation
    /// for the reduced flow.
    MonotoneCheck {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Orthant signs such as "(-,+)".
        #[arg(long)]
        cone: Option<String>,
        #[arg(long, default_value_t = 46)]
        grid: usize,
        #[arg(long, default_value_t = 20)]
        epd_samples: usize,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 5.0)]
        pair_time: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Audit the seven standing assumptions.
    CheckAssumptions {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[arg(long, default_value_t = 1000)]
        boundary_samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Return-map limit-cycle detection.
    LimitCycle {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        initial: Option<Vec<f64>>,
        /// 1-based coordinate defining the section.
        #[arg(long, default_value_t = 1)]
        section_index: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        section_value: f64,
        #[arg(long, value_enum, default_value_t = DirectionArg::Up)]
        direction: DirectionArg,
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
        #[arg(long, default_value_t = 20)]
        min_crossings: usize,
        #[arg(long, default_value_t = 400)]
        max_crossings: usize,
        /// Agreement required among the trailing crossings.
        #[arg(long, default_value_t = 1e-6)]
        cycle_tol: f64,
    },
}

fn configure_workers() -> Result<(), String> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
