//! `maxkcut`: generate datasets, run Max k-Cut SDP / k-means clustering,
//! evaluate clusterings, and render diagnostics.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O.

mod commands;
mod config;
mod render;
mod report;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "maxkcut", version, about = "Max k-Cut SDP clustering toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate datasets and weight matrices
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Cluster points or a weight matrix
    Cluster(Box<ClusterArgs>),
    /// Rand index between clusterings, optionally over repetition dirs
    Eval(EvalArgs),
    /// Render matrix heatmaps (PPM) and 2-D scatter plots (SVG)
    Render {
        #[command(subcommand)]
        kind: RenderKind,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Gaussian clusters with means on a circle, written as a points CSV
    Ring {
        /// Number of Gaussian clusters
        #[arg(long, default_value_t = 8)]
        clusters: usize,
        /// Points per cluster
        #[arg(long, default_value_t = 20)]
        per: usize,
        /// Standard deviation of each cluster
        #[arg(long, default_value_t = 0.2)]
        sigma: f64,
        /// Radius of the circle of means
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Random weight matrix, written in the text matrix format
    RandomWeights {
        /// Matrix size
        #[arg(long)]
        n: usize,
        /// Weight family
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Point dimension for the euclidean family
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output matrix path
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Random per-digit subset of MNIST IDX files, binarized, as a points CSV
    MnistSubset {
        /// IDX image file (magic 0x00000803)
        #[arg(long)]
        images: PathBuf,
        /// IDX label file (magic 0x00000801)
        #[arg(long)]
        labels: PathBuf,
        /// Digits to include
        #[arg(long, value_delimiter = ',', default_values_t = vec![0, 1, 2, 3, 4])]
        digits: Vec<usize>,
        /// Examples per digit
        #[arg(long, default_value_t = 20)]
        per: usize,
        /// Binarization threshold: pixel > threshold maps to 1
        #[arg(long, default_value_t = 127)]
        threshold: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    /// i.i.d. standard normal weights (possibly negative)
    Gaussian,
    /// Squared distances between uniform points in [0,1]^dim
    Euclidean,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    SdpFixedPoint,
    SdpRandom,
    Kmeans,
}

impl MethodArg {
    pub fn name(self) -> &'static str {
        match self {
            MethodArg::SdpFixedPoint => "sdp-fixed-point",
            MethodArg::SdpRandom => "sdp-random",
            MethodArg::Kmeans => "kmeans",
        }
    }
}

/// Flags mirror the `RunConfig` keys; every value resolves as
/// CLI flag > config file > built-in default.
#[derive(Args)]
struct ClusterArgs {
    /// Points CSV (columns x0..xd, optional trailing label column)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Weight matrix file (first line n, then n whitespace-separated rows)
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Number of clusters
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// Rounding trials for sdp-random (best of trials)
    #[arg(long)]
    trials: Option<usize>,
    /// Restarts for kmeans
    #[arg(long)]
    restarts: Option<usize>,
    /// Relaxation solve: iteration cap
    #[arg(long)]
    max_iters: Option<usize>,
    /// Relaxation solve: absolute residual tolerance
    #[arg(long)]
    eps_abs: Option<f64>,
    /// Relaxation solve: relative residual tolerance
    #[arg(long)]
    eps_rel: Option<f64>,
    /// Relaxation solve: initial ADMM penalty
    #[arg(long)]
    rho: Option<f64>,
    /// Relaxation solve: adaptive penalty rescaling (true/false)
    #[arg(long)]
    adaptive_rho: Option<bool>,
    /// Relaxation solve: over-relaxation factor in [1, 2)
    #[arg(long)]
    over_relaxation: Option<f64>,
    /// Fixed point rounding: cap on T' applications
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Fixed point rounding: entrywise vertex tolerance
    #[arg(long)]
    vertex_tol: Option<f64>,
    /// Fixed point rounding: Frobenius stall threshold
    #[arg(long)]
    step_tol: Option<f64>,
    /// Assignments CSV output (default assignments.csv)
    #[arg(long)]
    out_assignments: Option<PathBuf>,
    /// Report JSON output (default report.json)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Dump every T' iterate here (sdp-fixed-point only)
    #[arg(long)]
    trace_dir: Option<PathBuf>,
    /// Flat key=value config file; flags given here override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted assignments CSV (index,label)
    #[arg(long)]
    pred: PathBuf,
    /// Reference clustering: assignments CSV or a labeled points CSV
    #[arg(long)]
    truth: PathBuf,
    /// Batch mode: treat --pred/--truth as names inside each subdirectory
    /// of this directory and report mean ± standard deviation
    #[arg(long)]
    batch: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RenderKind {
    /// PPM P6 heatmap(s); entries mapped from [-1/(k-1), 1] to dark..bright
    Heatmap {
        /// A single matrix file
        #[arg(long)]
        input: Option<PathBuf>,
        /// A directory of iterate_*.txt files (one PPM per iterate)
        #[arg(long)]
        trace_dir: Option<PathBuf>,
        /// k, fixing the colormap floor -1/(k-1)
        #[arg(long)]
        k: usize,
        /// Permute rows/columns so the final matrix is block diagonal
        #[arg(long)]
        permute: bool,
        /// Assignments CSV defining the permutation (otherwise derived from
        /// the final iterate)
        #[arg(long)]
        assignments: Option<PathBuf>,
        /// Output file (with --input) or directory (with --trace-dir)
        #[arg(short, long)]
        out: PathBuf,
    },
    /// SVG scatter of 2-D points, one color and minimal enclosing circle
    /// per cluster
    Scatter {
        /// Points CSV; must be 2-D
        #[arg(long)]
        points: PathBuf,
        /// Assignments CSV (index,label)
        #[arg(long)]
        assignments: PathBuf,
        /// Seed for the randomized enclosing-circle computation
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output SVG path
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn exit_code(err: &maxkcut::Error) -> i32 {
    use maxkcut::Error;
    match err {
        Error::InvalidArgument(_) | Error::DimensionMismatch(_) | Error::NotPartitionMatrix(_) => {
            1
        }
        Error::Numerical(_) | Error::NotPsd(_) => 2,
        Error::Parse { .. } | Error::Format(_) | Error::Io(_) => 3,
    }
}

fn dispatch(cli: Cli) -> maxkcut::Result<()> {
    match cli.command {
        Command::Generate { kind } => commands::generate(kind),
        Command::Cluster(args) => commands::cluster(*args),
        Command::Eval(args) => commands::eval(args),
        Command::Render { kind } => commands::render(kind),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
