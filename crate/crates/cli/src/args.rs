use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "doa",
    about = "Certified underapproximations of safe domains of attraction \
             for discrete-time systems",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Construct the initial safe region of attraction and write a
    /// certificate file.
    InitialRoa(InitialRoaArgs),
    /// Evaluate certificate membership for a list of points.
    Check(CheckArgs),
    /// Export a planar cross-section of a certified region as CSV.
    Section(SectionArgs),
    /// Simulate a trajectory and judge safety and attraction.
    Simulate(SimulateArgs),
}

#[derive(Args)]
pub struct CommonArgs {
    /// JSON file with defaults for the flags of this command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct InitialRoaArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// System name (two_machine or cart_pole).
    #[arg(long)]
    pub system: Option<String>,

    /// Feedback gain override for cart_pole (comma-separated, 4 entries).
    #[arg(long, allow_hyphen_values = true)]
    pub gain: Option<String>,

    /// Margin subtracted from lambda_min(Q); defaults to 0.01 lambda_min(Q).
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Q matrix: n comma-separated values for a diagonal, or n*n row-major.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,

    /// Construction box radii (comma-separated, one per state).
    #[arg(long)]
    pub b: Option<String>,

    /// Depth stored in the certificate.
    #[arg(long)]
    pub depth: Option<usize>,

    /// Output certificate path; defaults to <system>.doa.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Certificate file produced by initial-roa.
    pub cert: Option<PathBuf>,

    /// Points: inline "x1,x2;y1,y2" or a CSV file with one point per row.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,

    /// Depth override (defaults to the certificate's stored depth).
    #[arg(long)]
    pub depth: Option<usize>,

    /// Also report the smallest certifying depth, scanning up to this bound.
    #[arg(long, value_name = "KMAX")]
    pub depth_scan: Option<usize>,

    /// Write JSON-lines verdicts here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SectionArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Certificate file produced by initial-roa.
    pub cert: Option<PathBuf>,

    /// The two varying state coordinates (0-based).
    #[arg(long, num_args = 2, value_names = ["I", "J"])]
    pub axes: Option<Vec<usize>>,

    /// Coordinate ranges: lo_i hi_i lo_j hi_j.
    #[arg(long, num_args = 4, allow_hyphen_values = true,
          value_names = ["LO_I", "HI_I", "LO_J", "HI_J"])]
    pub range: Option<Vec<f64>>,

    /// Grid resolution per axis.
    #[arg(long, num_args = 2, value_names = ["NI", "NJ"])]
    pub res: Option<Vec<usize>>,

    /// Values for the non-varying coordinates (comma-separated, full state).
    #[arg(long, allow_hyphen_values = true)]
    pub fixed: Option<String>,

    /// Depth override (defaults to the certificate's stored depth).
    #[arg(long)]
    pub depth: Option<usize>,

    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// System name (two_machine or cart_pole).
    #[arg(long)]
    pub system: Option<String>,

    /// Feedback gain override for cart_pole (comma-separated, 4 entries).
    #[arg(long, allow_hyphen_values = true)]
    pub gain: Option<String>,

    /// Initial state (comma-separated).
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,

    /// Number of steps.
    #[arg(long)]
    pub steps: Option<usize>,

    /// Norm threshold for calling the final state converged.
    #[arg(long)]
    pub conv_tol: Option<f64>,

    /// Output trajectory CSV path (omit to skip the CSV).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
