//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noma_ee::QosBasis;

#[derive(Debug, Parser)]
#[command(name = "noma-ee", version, about = "Energy-efficient power allocation for downlink NOMA")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-user minimum powers and whether the budget covers them.
    Feasibility(InstanceArgs),
    /// Optimal power split at a given fraction of the budget.
    Allocate {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Fraction of the budget to transmit, in [theta_min, 1].
        #[arg(long)]
        theta: f64,
    },
    /// EE-optimal transmit power and split.
    Optimize {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Also run Dinkelbach's method and report the relative EE gap.
        #[arg(long)]
        cross_check: bool,
    },
    /// Equal-slot TDMA baseline with exhaustive power search.
    Tdma {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        tdma: TdmaArgs,
    },
    /// EE versus budget for EEPA, MaxSE and TDMA with K = 2, 3.
    Figure1(FigureArgs),
    /// EE versus common minimum rate at a fixed budget.
    Figure2(FigureArgs),
    /// EE-optimal NOMA versus budget for four user layouts.
    Figure3(FigureArgs),
    /// Custom Monte Carlo sweep.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TdmaQos {
    PerSlot,
    TimeAveraged,
}

impl From<TdmaQos> for QosBasis {
    fn from(q: TdmaQos) -> Self {
        match q {
            TdmaQos::PerSlot => QosBasis::PerSlot,
            TdmaQos::TimeAveraged => QosBasis::TimeAveraged,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PhysicalArgs {
    /// Total transmit power budget P.
    #[arg(long, allow_hyphen_values = true)]
    pub power_dbm: Option<f64>,
    /// Noise power σ².
    #[arg(long, allow_hyphen_values = true)]
    pub noise_dbm: Option<f64>,
    /// Circuit power P_c.
    #[arg(long, allow_hyphen_values = true)]
    pub circuit_dbm: Option<f64>,
    /// Path-loss exponent.
    #[arg(long)]
    pub alpha: Option<f64>,
}

/// One channel realization plus rate requirements.
#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    #[command(flatten)]
    pub physical: PhysicalArgs,
    /// Channel power gains |h_k|², comma-separated. Overrides distances.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["distances", "users"])]
    pub gains: Option<Vec<f64>>,
    /// User distances in metres, comma-separated; fading is drawn from --seed.
    #[arg(long, value_delimiter = ',', conflicts_with = "users")]
    pub distances: Option<Vec<f64>>,
    /// Number of users placed at --distance.
    #[arg(long)]
    pub users: Option<usize>,
    /// Distance used with --users.
    #[arg(long, default_value_t = 80.0)]
    pub distance: f64,
    /// Minimum rates in bits/s/Hz: one value for every user, or one per user
    /// in ascending-gain order.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub rmin: Vec<f64>,
    /// Seed of the Rayleigh fading draw.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TdmaArgs {
    /// Number of points in the TDMA power search grid.
    #[arg(long = "tdma-grid-points")]
    pub grid_points: Option<usize>,
    /// Rate each user's minimum-rate requirement is checked against.
    #[arg(long, value_enum)]
    pub tdma_qos: Option<TdmaQos>,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[command(flatten)]
    pub physical: PhysicalArgs,
    /// Common minimum rate, when the sweep does not vary it.
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = crate::DEFAULT_SEED)]
    pub seed: u64,
    /// Sweep values, either `start:stop:step` or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub tdma: TdmaArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Output file; a `<output>.meta.json` sidecar is written next to it.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// Vary the budget, in dBm.
    Power,
    /// Vary the common minimum rate.
    Rmin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Eepa,
    Maxse,
    Tdma,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub figure: FigureArgs,
    #[arg(long, value_enum)]
    pub sweep: SweepKind,
    /// One scenario per occurrence, distances in metres, comma-separated.
    #[arg(long)]
    pub distances: Vec<String>,
    /// Equidistant scenarios with these user counts, at --distance.
    #[arg(long, value_delimiter = ',')]
    pub users: Vec<usize>,
    #[arg(long, default_value_t = 80.0)]
    pub distance: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "eepa,maxse,tdma")]
    pub strategies: Vec<StrategyArg>,
}
