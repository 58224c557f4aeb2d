use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use local_nash::{DerivMethod, Tolerances};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "lnash", version, about = "Find, classify and track local Nash equilibria of continuous games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify joint strategies as differential Nash equilibria or not.
    Classify(ClassifyArgs),
    /// Search a box for equilibria with multi-start Newton.
    Solve(SolveArgs),
    /// Simulate gradient play from a starting point.
    Flow(FlowArgs),
    /// Track an equilibrium as the costs are perturbed.
    Continue(ContinueArgs),
    /// Open-loop differential games.
    Olg {
        #[command(subcommand)]
        command: OlgCommand,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Deriv {
    Analytic,
    Dual,
    Fd,
}

impl From<Deriv> for DerivMethod {
    fn from(d: Deriv) -> Self {
        match d {
            Deriv::Analytic => DerivMethod::Analytic,
            Deriv::Dual => DerivMethod::Dual,
            Deriv::Fd => DerivMethod::CentralFd,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TolArgs {
    /// Criticality threshold on the sup-norm of the game form.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_crit: f64,
    /// Half-width of the eigenvalue sign band.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_eig: f64,
    /// Relative singular-value cutoff for degeneracy.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_sing: f64,
}

impl TolArgs {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            crit: self.tol_crit,
            eig: self.tol_eig,
            sing: self.tol_sing,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    /// Game configuration (JSON).
    #[arg(long)]
    pub game: PathBuf,
    /// Joint strategy as comma-separated numbers; repeat for several points.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Vec<String>,
    /// CSV file with a header row and one point per record.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Deriv::Analytic)]
    pub deriv: Deriv,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Print full reports as JSON instead of one line per point.
    #[arg(long)]
    pub json: bool,
    /// Write reports to this file: JSON if it ends in `.json`, CSV otherwise.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// `lo,hi` for every coordinate, or one `lo,hi` pair per coordinate.
    #[arg(long = "box", default_value = "-5,5", allow_hyphen_values = true)]
    pub bounds: String,
    /// Number of starting points.
    #[arg(long, default_value_t = 64)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Deriv::Analytic)]
    pub deriv: Deriv,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long)]
    pub json: bool,
    /// Roots table: JSON if it ends in `.json`, CSV otherwise.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FlowArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Initial joint strategy.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    #[arg(long, value_enum, default_value_t = Integrator::Rk45)]
    pub integrator: Integrator,
    /// Step of the fixed-step integrator.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub atol: f64,
    #[arg(long, default_value_t = 20.0)]
    pub tmax: f64,
    /// Stop once the sup-norm of the game form is at or below this.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_stop: f64,
    /// Report divergence once the sup-norm of the strategy reaches this.
    #[arg(long, default_value_t = 1e6)]
    pub norm_bound: f64,
    #[arg(long, value_enum, default_value_t = Deriv::Analytic)]
    pub deriv: Deriv,
    /// Trajectory CSV with columns t, u1..um, omega_norm.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ContinueArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Non-degenerate equilibrium of the unperturbed game.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    /// `zero`, `own-linear`, or a JSON array of per-player costs (inline or a file path).
    #[arg(long, default_value = "own-linear")]
    pub zeta: String,
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub s_range: String,
    #[arg(long, default_value_t = 0.1)]
    pub ds: f64,
    /// Ratio sigma_min / sigma_max below which a fold is reported.
    #[arg(long, default_value_t = 1e-8)]
    pub fold_tol: f64,
    #[arg(long, value_enum, default_value_t = Deriv::Analytic)]
    pub deriv: Deriv,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Path CSV with columns s, sigma1..sigmam, sigma_min, verdict.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum OlgCommand {
    /// Roll out the state (and optionally every costate) for a control profile.
    Simulate(OlgSimulateArgs),
    /// Per-interval control gradients of every player.
    Gradient(OlgInput),
    /// Simultaneous gradient steps on all players' controls.
    Play(OlgPlayArgs),
    /// Classify a control profile on the discretized strategy space.
    Classify(OlgClassifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OlgInput {
    /// Open-loop game configuration (JSON).
    #[arg(long)]
    pub game: PathBuf,
    /// Control profile CSV (t, then every player's entries per interval).
    #[arg(long, conflicts_with = "constant")]
    pub profile: Option<PathBuf>,
    /// Constant controls, all players' entries concatenated.
    #[arg(long, allow_hyphen_values = true)]
    pub constant: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct OlgSimulateArgs {
    #[command(flatten)]
    pub input: OlgInput,
    /// Append costate columns p{i}_{j} for every player.
    #[arg(long)]
    pub costate: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct OlgPlayArgs {
    #[command(flatten)]
    pub input: OlgInput,
    #[arg(long, default_value_t = 0.1)]
    pub step_size: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct OlgClassifyArgs {
    #[command(flatten)]
    pub input: OlgInput,
    /// Central-difference step on each control entry.
    #[arg(long, default_value_t = 1e-4)]
    pub fd_step: f64,
    /// Refuse problems with more control unknowns than this.
    #[arg(long, default_value_t = 400)]
    pub max_unknowns: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long)]
    pub json: bool,
}
