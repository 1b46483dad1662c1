use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "grigid", version, about = "Self-similarity rigidity checks for function graphs")]
pub struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(usize))]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a graph as SVG, with optional framing rectangles, Cantor stages,
    /// attractor points or direction sets.
    Render(RenderArgs),
    /// Self-similarity residual of an IFS against a graph.
    Verify(VerifyArgs),
    /// Cover-based Lipschitz certificate.
    CertifyLipschitz(LipschitzArgs),
    /// Cantor-stage slope certificate that the function is affine.
    CertifyAffine(AffineArgs),
    /// Admissible rotation angles from the direction image.
    ClassifyRotation(RotationArgs),
    /// Fit k similitudes to a graph.
    Fit(FitCmdArgs),
    /// Affine test plus similitude fit.
    Verdict(VerdictArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionKind {
    Affine,
    Takagi,
    Weierstrass,
    Cantor,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Built-in function to sample.
    #[arg(long, value_enum, conflicts_with = "csv")]
    pub function: Option<FunctionKind>,
    /// Sampled graph (`x,y` CSV with a `.meta` sidecar).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Slope for `--function affine`.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub a: f64,
    /// Intercept for `--function affine`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Weierstrass amplitude base.
    #[arg(long, default_value_t = grigid::graph::DEFAULT_WEIERSTRASS_A)]
    pub wa: f64,
    /// Weierstrass frequency base (odd).
    #[arg(long, default_value_t = grigid::graph::DEFAULT_WEIERSTRASS_B)]
    pub wb: u32,
    /// Series or digit depth; each function has its own default.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Grid intervals for built-in functions.
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    /// RNG seed.
    #[arg(long, env = "GRIGID_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub seed: SeedArgs,
    /// IFS used by the overlays.
    #[arg(long)]
    pub ifs: Option<PathBuf>,
    /// SVG output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Framing rectangles of every word interval at this depth.
    #[arg(long, requires = "ifs")]
    pub frames: Option<usize>,
    /// Cantor stage to draw under the plot.
    #[arg(long, requires = "ifs")]
    pub cantor: Option<usize>,
    /// Chaos-game points of the attractor.
    #[arg(long, requires = "ifs")]
    pub points: Option<usize>,
    /// Draw the direction image seen from the left endpoint.
    #[arg(long)]
    pub directions: bool,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long, default_value_t = 800.0)]
    pub width: f64,
    #[arg(long, default_value_t = 600.0)]
    pub height: f64,
    /// Also save the sampled graph as CSV.
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportOut {
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub ifs: PathBuf,
    /// Residual tolerance; defaults to two grid spacings.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub report: ReportOut,
}

#[derive(Debug, Args)]
pub struct LipschitzArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub ifs: PathBuf,
    /// Comma-separated pair distances.
    #[arg(long, value_delimiter = ',', default_values_t = default_deltas())]
    pub deltas: Vec<f64>,
    /// Sampled pairs per distance.
    #[arg(long, default_value_t = grigid::cover::DEFAULT_PAIR_BUDGET)]
    pub pairs: usize,
    #[command(flatten)]
    pub report: ReportOut,
}

pub fn default_deltas() -> Vec<f64> {
    (2..=8).map(|e| 0.5f64.powi(e)).collect()
}

#[derive(Debug, Args)]
pub struct AffineArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub ifs: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub stages: usize,
    /// Target interval `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 1.0])]
    pub interval: Vec<f64>,
    /// Lipschitz constant; certified from the cover argument when absent.
    #[arg(long)]
    pub lipschitz: Option<f64>,
    #[command(flatten)]
    pub report: ReportOut,
}

#[derive(Debug, Args)]
pub struct RotationArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Candidate angles: radians or `pi` forms such as `2pi/3`.
    #[arg(long, value_delimiter = ',', default_value = "0,pi,pi/2,2pi/3,pi/3,pi/4,1")]
    pub angles: Vec<String>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Fail unless exactly the angles 0 and pi are admissible.
    #[arg(long)]
    pub expect_trivial: bool,
    #[command(flatten)]
    pub report: ReportOut,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Number of maps.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = grigid::verifier::DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Total objective evaluations across restarts.
    #[arg(long, default_value_t = grigid::verifier::DEFAULT_FIT_BUDGET)]
    pub budget: usize,
    #[arg(long, default_value_t = grigid::verifier::DEFAULT_SEARCH_POINTS)]
    pub search_points: usize,
    /// Search all rotation angles instead of 0 and pi only.
    #[arg(long)]
    pub free_rotations: bool,
    #[command(flatten)]
    pub seed: SeedArgs,
}

#[derive(Debug, Args)]
pub struct FitCmdArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Write the fitted IFS here.
    #[arg(long)]
    pub save_ifs: Option<PathBuf>,
    #[command(flatten)]
    pub report: ReportOut,
}

#[derive(Debug, Args)]
pub struct VerdictArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Line-fit residual below which the graph counts as affine.
    #[arg(long, default_value_t = grigid::verifier::DEFAULT_TOL_AFFINE)]
    pub tol_affine: f64,
    #[command(flatten)]
    pub report: ReportOut,
}
