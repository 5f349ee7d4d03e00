use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Length spectra and geodesics of screw sub-Riemannian structures on frame
/// bundles of space forms.
#[derive(Debug, Parser)]
#[command(name = "screwspec", version, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Length spectrum of the model space SO(M_k).
    ModelSpectrum(ModelSpectrumArgs),
    /// Length spectrum of a quotient, from its complex length spectrum.
    Spectrum(SpectrumArgs),
    /// Sample a geodesic and dump its trajectory.
    Geodesic(GeodesicArgs),
    /// Run the seeded property suites.
    Verify(VerifyArgs),
    /// Compare the length sets of two spectrum files.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Screw {
    /// Curvature of the space form: 0, 1 or -1.
    #[arg(short = 'k', allow_negative_numbers = true)]
    pub k: i64,
    /// Pitch of the screw distribution.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct Budget {
    /// Largest length reported.
    #[arg(long)]
    pub cutoff: f64,
    /// Largest fibre rotation index m.
    #[arg(long = "mmax", default_value_t = 64)]
    pub m_max: u64,
    /// Residual accepted when detecting a rational rotation number.
    #[arg(long, default_value_t = 1e-9)]
    pub rational_tol: f64,
    /// Largest denominator tried when detecting a rational rotation number.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_denominator: u64,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelSpectrumArgs {
    #[command(flatten)]
    pub screw: Screw,
    #[command(flatten)]
    pub budget: Budget,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub screw: Screw,
    #[command(flatten)]
    pub budget: Budget,
    #[command(flatten)]
    pub output: Output,
    /// Complex length spectrum (JSON).
    pub clspec: PathBuf,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub screw: Screw,
    /// Curvature of the projected helix.
    #[arg(long, conflicts_with = "lie")]
    pub kappa: Option<f64>,
    /// Torsion of the projected helix.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "lie")]
    pub tau: Option<f64>,
    /// Use the Lie form with controls --x and --y.
    #[arg(long, requires_all = ["x", "y"])]
    pub lie: bool,
    /// Initial control x, as "x1,x2,x3".
    #[arg(long, allow_hyphen_values = true, requires = "lie")]
    pub x: Option<String>,
    /// Rotation control y, as "y1,y2,y3".
    #[arg(long, allow_hyphen_values = true, requires = "lie")]
    pub y: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub t1: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    /// Check horizontality and speed on the sample grid.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Horizontality,
    Frenet,
    Equivalence,
    Closing,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Relative tolerance on lengths.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}
