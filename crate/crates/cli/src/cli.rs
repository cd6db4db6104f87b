use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "boltzecho", version, about = "Boltzmann echo, Loschmidt echo and purity of perturbed cat maps under decoherence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute echo or purity series for one parameter cell and fit their decay rates.
    Echo(EchoArgs),
    /// Fit decay rates over an (epsilon, sigma) grid, with the marginal rows needed for the sum law.
    Sweep(SweepArgs),
    /// Write the translation weights and channel eigenvalues of a kernel.
    KernelDump(KernelArgs),
    /// Compare the closed-form Lyapunov exponent with a tangent-map estimate.
    Lyapunov(LyapunovArgs),
}

/// Parameters shared by the simulation commands. Flags override the config
/// file, which overrides the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file, or a manifest written by an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Laptop-scale run: N = 200, n_s = 4 unless given explicitly.
    #[arg(long)]
    pub desk: bool,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Kernel model: gdm, dc or ldm.
    #[arg(long)]
    pub model: Option<String>,
    /// Hilbert space dimension N.
    #[arg(long = "dim", short = 'n')]
    pub dim: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<i64>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Perturbed map parameter; conflicts with --sigma-over-hbar.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "sigma_over_hbar")]
    pub k_prime: Option<f64>,
    #[arg(long)]
    pub sigma_over_hbar: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub t_max: Option<usize>,
    #[arg(long)]
    pub n_s: Option<usize>,
    #[arg(long)]
    pub gdm_tail_tol: Option<f64>,
    #[arg(long)]
    pub ldm_images: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EchoArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Series to compute: be, le, purity. Repeat or comma-separate.
    #[arg(long = "kind", value_delimiter = ',')]
    pub kinds: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Built-in grid: fig1 (GDM), fig2 (DC) or fig3 (LDM).
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Vec<f64>,
    #[arg(long, value_delimiter = ',', conflicts_with = "k_primes")]
    pub sigmas_over_hbar: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub k_primes: Vec<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Reuse finished cells from the manifest in the output directory.
    #[arg(long)]
    pub resume: bool,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct LyapunovArgs {
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    pub a: i64,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    pub b: i64,
    #[arg(long, default_value_t = 0.001)]
    pub k: f64,
    #[arg(long, default_value_t = 100_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 10)]
    pub trajectories: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}
