use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exemplar_core::robustness::OutlierMode;
use exemplar_core::TiePolicy;

/// Standards, exemplars and exemplar networks of relational data.
#[derive(Debug, Parser)]
#[command(name = "exemplar", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a relation CSV against the relation rules.
    Validate(Input),
    /// Aggregated Borda scores and the standard.
    Score(ScoreArgs),
    /// Exemplar network at one scale or over a graph.
    Network(NetworkArgs),
    /// Exemplar counts and durations over every scale.
    Sweep(SweepArgs),
    /// Bootstrap stability of the standard.
    Bootstrap(BootstrapArgs),
    /// Outlier-injection experiment on a planar point cloud.
    Outliers(OutlierArgs),
    /// Build a relation CSV from raw data.
    #[command(subcommand)]
    Relation(RelationCommand),
}

#[derive(Debug, Args)]
pub struct Input {
    /// Relation CSV (row i holds costs from object i).
    pub input: PathBuf,
    /// Input has a header row and a leading label column.
    #[arg(long)]
    pub labels: bool,
}

#[derive(Debug, Args)]
pub struct Scoring {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_name = "index|midrank", default_value_t = TiePolicy::IndexOrder)]
    pub tie_policy: TiePolicy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub scoring: Scoring,
    /// Write `label,score` lines here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Only `csv` is supported.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("neighborhood").required(true).args(["k", "auto_k", "graph"]))]
pub struct NetworkArgs {
    #[command(flatten)]
    pub scoring: Scoring,
    /// Neighborhood size.
    #[arg(long)]
    pub k: Option<usize>,
    /// Use the scale maximizing (n - k + 1) - E(k).
    #[arg(long)]
    pub auto_k: bool,
    /// Adjacency file (`label: neighbor,neighbor`) defining the neighborhoods.
    #[arg(long, value_name = "ADJACENCY")]
    pub graph: Option<PathBuf>,
    /// `dot` or `json`.
    #[arg(long, value_enum, default_value_t = Format::Dot)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Add a bootstrap section to a JSON report.
    #[arg(long, requires = "seed")]
    pub bootstraps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scoring: Scoring,
    /// `csv` for `k,E(k),n-k+1` lines, `json` for the full report at the
    /// optimal scale.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write `label,duration` lines here.
    #[arg(long)]
    pub durations: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 200)]
    pub bootstraps: usize,
    #[arg(long, required = true)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExclusionArg {
    /// Reject candidates inside the exclusion rectangle.
    Rect,
    /// Reject candidates inside its x-range or its y-range.
    Both,
}

#[derive(Debug, Args)]
pub struct OutlierArgs {
    /// Points CSV, two coordinates per line.
    pub input: PathBuf,
    #[arg(long)]
    pub labels: bool,
    #[arg(long, default_value_t = OutlierMode::Spread)]
    pub mode: OutlierMode,
    #[arg(long, required = true)]
    pub seed: Option<u64>,
    /// Bootstrap rounds for the reference standards.
    #[arg(long, default_value_t = 200)]
    pub bootstraps: usize,
    /// Outliers per step (default: 1% of n, rounded up).
    #[arg(long)]
    pub step: Option<usize>,
    /// Stop after this many outliers, in percent of n.
    #[arg(long, default_value_t = 300.0)]
    pub cap_percent: f64,
    #[arg(long, value_enum, default_value_t = ExclusionArg::Rect)]
    pub exclusion: ExclusionArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum RelationCommand {
    /// Euclidean distances between points.
    Euclid {
        points: PathBuf,
        #[arg(long)]
        labels: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Asymmetric Hausdorff distances between P1 bitmaps.
    Hausdorff {
        #[arg(required = true)]
        images: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Co-authorship relation from JSON-lines publication records.
    Coauthor {
        publications: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the raw affinity table here.
        #[arg(long)]
        affinity: Option<PathBuf>,
        /// Write the co-author adjacency file here.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
}
