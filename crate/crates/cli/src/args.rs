use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "comprehend",
    version,
    about = "Exact, simulated and asymptotic laws of the number of sessions understood"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact pmf of B_n by dynamic programming.
    Exact {
        #[command(flatten)]
        model: ModelArgs,
        /// Cross-check against exhaustive enumeration when n <= 12.
        #[arg(long)]
        self_check: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Pmf of B_n by enumerating all 2^n outcome paths (n <= 20).
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Per-session marginals p_1..p_n.
    Marginals {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact pmf next to its binomial approximation, per k.
    Approx {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Binomial-approximation diagnostics over a (q, n) grid with eps = c·n^(-2-eta).
    Converge {
        /// Comma-separated quality values.
        #[arg(long = "q", value_delimiter = ',', required = true, num_args = 1..)]
        q_list: Vec<f64>,
        /// Comma-separated session counts.
        #[arg(long = "n", value_delimiter = ',', required = true, num_args = 1..)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        #[arg(long, default_value = "uniform")]
        dist: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Seeded Monte Carlo simulation of course outcomes.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report which validity conditions the parameters satisfy.
    Validate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = "uniform")]
        dist: String,
        #[arg(long, value_enum, default_value_t = Mode::Hypothesis1)]
        mode: Mode,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Number of sessions.
    #[arg(long)]
    pub n: usize,
    /// Quality parameter in (0, 1).
    #[arg(long)]
    pub q: f64,
    /// Dependence parameter (>= 0).
    #[arg(long)]
    pub eps: f64,
    /// `uniform` or a path to a CDF table file.
    #[arg(long, default_value = "uniform")]
    pub dist: String,
    /// Accept (n-1)·eps > min(q, 1-q) and clamp thresholds.
    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Mixture,
    Theorem1,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Strict,
    Hypothesis1,
    Relaxed,
}
