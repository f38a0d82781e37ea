use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::emit::Format;

/// Effective couplings, GKSL forms and dynamics of quantum systems coupled
/// through cascade beam-splitter networks.
#[derive(Debug, Parser)]
#[command(name = "cascade", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format (each subcommand has its own default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Suppress reports on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    /// Read angle flags in degrees. Spec files always hold radians.
    #[arg(long, global = true)]
    pub degrees: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coupling matrix ζ of a network.
    Couplings(CouplingsArgs),
    /// Rates, jump operators and Hamiltonian of the GKSL form.
    Gksl(GkslArgs),
    /// Neighbour couplings ξ_k of a regular network.
    Xi(XiArgs),
    /// Regular schedule that keeps a single neighbour order.
    Design(DesignArgs),
    /// |ξ_1..ξ_kmax| of two-channel networks over a (τ_1, φ_2) grid.
    Sweep(SweepArgs),
    /// Smallest τ_1 that keeps the pruning recursion feasible, per order.
    Threshold(ThresholdArgs),
    /// Integrate the master equation on a truncated Fock space.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct CouplingsArgs {
    pub spec: PathBuf,
    /// Use path enumeration instead of matrix products.
    #[arg(long, conflicts_with = "check")]
    pub oracle: bool,
    /// Run both methods and fail if they disagree beyond 1e-12.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClosedForm {
    Evenodd,
}

#[derive(Debug, Args)]
pub struct GkslArgs {
    pub spec: PathBuf,
    /// Compare against a closed form and report the deviations.
    #[arg(long, value_enum)]
    pub closed_form: Option<ClosedForm>,
}

#[derive(Debug, Args)]
pub struct XiArgs {
    pub spec: PathBuf,
    /// Highest neighbour order (default M - 1).
    #[arg(long)]
    pub kmax: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Neighbour order n that keeps its coupling.
    #[arg(long)]
    pub order: usize,
    /// Base transmissivity of order n.
    #[arg(long)]
    pub tau: f64,
    /// Number of orders in the schedule (default 10·n).
    #[arg(long)]
    pub count: Option<usize>,
    /// Phase of order n.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub loss: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Fixed first-order phase.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi1: f64,
    /// Grid points for τ_1 over [0, 1].
    #[arg(long, default_value_t = 101)]
    pub tau_points: usize,
    /// Grid points for φ_2 over [0, 2π].
    #[arg(long, default_value_t = 73)]
    pub phi_points: usize,
    #[arg(long, default_value_t = 4)]
    pub kmax: usize,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 2)]
    pub kmin: usize,
    #[arg(long, default_value_t = 20)]
    pub kmax: usize,
    /// Grid spacing of the scan over τ_1.
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
    /// Bisect inside the last grid cell down to this width.
    #[arg(long)]
    pub refine: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Observables {
    /// ⟨n_m⟩ per site.
    Populations,
    /// ⟨n_m⟩ and Re/Im ⟨a_m⟩ per site.
    Moments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    /// Local damping plus cascade terms.
    Cascade,
    /// Collective jump operators and effective Hamiltonian.
    Gksl,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub spec: PathBuf,
    /// Levels kept per site.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub t_final: f64,
    #[arg(long)]
    pub dt: f64,
    /// Sites (1-based) that start with one quantum.
    #[arg(long, value_delimiter = ',', required = true)]
    pub init: Vec<usize>,
    /// Start from (|vacuum⟩ + |init⟩)/√2 instead of |init⟩.
    #[arg(long)]
    pub superpose: bool,
    #[arg(long, value_enum, default_value_t = Observables::Populations)]
    pub observables: Observables,
    #[arg(long, value_enum, default_value_t = GeneratorKind::Cascade)]
    pub generator: GeneratorKind,
    /// Emit every n-th step.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// Largest vectorised dimension d^(2M) allowed.
    #[arg(long, default_value_t = 1 << 24)]
    pub dim_cap: usize,
}
