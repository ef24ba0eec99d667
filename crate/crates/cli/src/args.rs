use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "mmslab",
    version,
    about = "Check synthetic-curvature inequalities on finite metric-measure spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    CsvSummary,
}

/// Where and how the report is written.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Output {
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `csv-summary` also writes one CSV row per parameter point to stdout.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpaceArg {
    /// Space file (JSON).
    #[arg(long)]
    pub space: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Search {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Maximum number of defect evaluations.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Comma-separated families: indicator-balls, indicator-random,
    /// log-affine, random-positive, hill-climb.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "indicator-balls,indicator-random,log-affine,random-positive,hill-climb"
    )]
    pub families: Vec<String>,
    /// Comma-separated interpolation parameters in (0, 1).
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.75")]
    pub t_grid: Vec<f64>,
    /// Intermediate-point slack; defaults to 0.51 × mesh.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Relative tolerance: the instance holds when defect ≥ -tol · rhs.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Path,
    Grid,
    Circle,
    Gaussian,
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BmModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TalagrandForm {
    Dual,
    Direct,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Write a generated space file.
    Generate {
        #[arg(long, value_enum)]
        kind: Generator,
        /// Points (per axis for grids).
        #[arg(long, default_value_t = 9)]
        n: usize,
        /// Side length for path and grid.
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 6.0)]
        circumference: f64,
        /// Gaussian line half width; defaults to 4/sqrt(K).
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        /// Separation of the two-point space.
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Check the metric-measure axioms of a space file.
    Validate {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Fraction of point pairs with a nonempty ε-midpoint set.
    Coverage {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        #[arg(long)]
        epsilon: Option<f64>,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Brunn–Minkowski over subset pairs.
    CheckBm {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: BmModeArg,
        #[command(flatten)]
        #[serde(flatten)]
        search: Search,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Prékopa–Leindler PL(K).
    CheckPl {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        #[arg(long = "K")]
        k: f64,
        #[command(flatten)]
        #[serde(flatten)]
        search: Search,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Borell–Brascamp–Lieb BBL(0,N) over a p-grid.
    CheckBbl {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        #[arg(long = "N")]
        n: f64,
        /// Comma-separated exponents (`inf` for +∞); defaults to a grid on [-1/N, ∞].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        p_grid: Option<Vec<String>>,
        #[command(flatten)]
        #[serde(flatten)]
        search: Search,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Largest K for which the search finds no PL(K) violation.
    EstimateK {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        #[arg(long, default_value_t = 0.0)]
        k_lo: f64,
        #[arg(long, default_value_t = 4.0)]
        k_hi: f64,
        #[arg(long, default_value_t = 0.05)]
        tol_k: f64,
        #[command(flatten)]
        #[serde(flatten)]
        search: Search,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Bishop–Gromov growth exponent over a radius grid.
    GrowthExponent {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        /// Comma-separated point indices, or `all`.
        #[arg(long, default_value = "all")]
        centers: String,
        /// Comma-separated ascending radii.
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        /// Also check the Bishop–Gromov inequality at this exponent.
        #[arg(long = "check-N")]
        check_n: Option<f64>,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Log-Sobolev defect of one field.
    Logsob {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        /// Field: file:<path>, const:<c>, dist:<i>[:<scale>], exp-dist:<i>:<a>.
        #[arg(long, allow_hyphen_values = true)]
        field: String,
        #[arg(long = "K")]
        k: f64,
        /// Gradient radius; defaults to the mesh.
        #[arg(long)]
        radius: Option<f64>,
        /// Absolute tolerance on the defect.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Poincaré defect of one field (recentered if needed).
    Poincare {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        #[arg(long, allow_hyphen_values = true)]
        field: String,
        #[arg(long = "K")]
        k: f64,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Talagrand T2(K), dual form for a field g or direct form for a measure.
    Talagrand {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        #[arg(long, value_enum)]
        form: TalagrandForm,
        /// Field g (dual form).
        #[arg(long, allow_hyphen_values = true)]
        field: Option<String>,
        /// Probability measure μ (direct form): dirac:<i>, uniform, file:<path>.
        #[arg(long)]
        mu: Option<String>,
        #[arg(long = "K")]
        k: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Diameter against 7.7·sqrt(N/K).
    BonnetMyers {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        #[arg(long = "K")]
        k: f64,
        #[arg(long = "N")]
        n: f64,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Product of two spaces, written as a space file.
    Product {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        /// Second factor.
        #[arg(long)]
        other: PathBuf,
        /// euclidean, max, or ell-<q>.
        #[arg(long, default_value = "euclidean")]
        combiner: String,
        #[arg(long, default_value_t = 4096)]
        size_guard: usize,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
    /// Quadratic Wasserstein distance between two measures.
    W2 {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArg,
        #[arg(long)]
        mu0: String,
        #[arg(long)]
        mu1: String,
        #[command(flatten)]
        #[serde(flatten)]
        output: Output,
    },
}

impl Command {
    pub fn output(&self) -> &Output {
        match self {
            Command::Generate { output, .. }
            | Command::Validate { output, .. }
            | Command::Coverage { output, .. }
            | Command::CheckBm { output, .. }
            | Command::CheckPl { output, .. }
            | Command::CheckBbl { output, .. }
            | Command::EstimateK { output, .. }
            | Command::GrowthExponent { output, .. }
            | Command::Logsob { output, .. }
            | Command::Poincare { output, .. }
            | Command::Talagrand { output, .. }
            | Command::BonnetMyers { output, .. }
            | Command::Product { output, .. }
            | Command::W2 { output, .. } => output,
        }
    }
}
