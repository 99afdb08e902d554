use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "gaia", version, about = "Multilevel Landau–Zener S-matrices by the generalized adiabatic impulse approximation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// S-matrix of a grid model, as (row, col, re, im, probability) rows.
    Grid(Io),
    /// Probability trace of a driven model between crossing groups, plus its S-matrix.
    Lzsm(LzsmArgs),
    /// GAIA against the exact propagator, optionally over a parameter sweep.
    Compare(CompareArgs),
    /// Zeros of P34 for four-level grid models, destructive-interference η for driven models.
    Interference(InterferenceArgs),
    /// Unitarity and equivalence checks on seeded random models.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
pub struct Io {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LzsmArgs {
    #[command(flatten)]
    pub io: Io,
    /// Crossing groups to propagate; defaults to the model file's value.
    #[arg(long)]
    pub crossings: Option<usize>,
    /// 1-based initial level.
    #[arg(long, default_value_t = 1)]
    pub initial: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub io: Io,
    /// NAME=START:STOP:COUNT with NAME one of eta, v, a, x, Delta, gamma, Omega.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long)]
    pub crossings: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub initial: usize,
    /// Oracle local error target per step.
    #[arg(long, default_value_t = gaia_core::exact_oracle::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Oracle window START:STOP.
    #[arg(long)]
    pub window: Option<String>,
    /// Oracle step budget per run.
    #[arg(long, default_value_t = gaia_core::exact_oracle::DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
}

#[derive(Debug, Args)]
pub struct InterferenceArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long)]
    pub sweep: String,
    /// Tolerance on the destructive-interference phase residuals, in radians.
    #[arg(long, default_value_t = gaia_core::gaia_lzsm::DESTRUCTIVE_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random models per check.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
}
