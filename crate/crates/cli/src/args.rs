//! Command-line surface. Every option is optional here so that values from a
//! TOML config file can fill the gaps; defaults live in `config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gevrey_spectral::PhaseConvention;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "gevrey-lab",
    version,
    about = "Gevrey-regularity verification lab for fifth-order KP-I"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    Equation,
    Reversed,
}

impl From<PhaseArg> for PhaseConvention {
    fn from(p: PhaseArg) -> Self {
        match p {
            PhaseArg::Equation => PhaseConvention::Equation,
            PhaseArg::Reversed => PhaseConvention::Reversed,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// TOML file with defaults; flags given on the command line win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    /// Force exact rational arithmetic (integer sigma only).
    #[arg(long, global = true, conflicts_with = "float")]
    pub exact: bool,
    /// Force big-float arithmetic.
    #[arg(long, global = true)]
    pub float: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time-derivative staircase at the origin from prescribed Gevrey data.
    Timejet(TimejetArgs),
    /// Factorial lower bounds and Gevrey-order fit of the origin series.
    Sharpness(SharpnessArgs),
    /// Majorant sequence inequalities and the main estimate.
    Majorant(MajorantArgs),
    /// Binomial counting inequalities behind the bilinear estimate.
    Combinatorics(CombinatoricsArgs),
    /// Pseudo-spectral evolution with norm and radius diagnostics.
    Spectral(SpectralArgs),
    /// Gevrey spectral profile as a field file, optionally with its jet.
    Profile(ProfileArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Timejet(_) => "timejet",
            Command::Sharpness(_) => "sharpness",
            Command::Majorant(_) => "majorant",
            Command::Combinatorics(_) => "combinatorics",
            Command::Spectral(_) => "spectral",
            Command::Profile(_) => "profile",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Preset name (`kp1_5`, `kawahara`), preset call, or a term sum.
    #[arg(long, allow_hyphen_values = true)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    /// Largest time order.
    #[arg(long = "J", alias = "j-max")]
    pub j_max: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TimejetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// x-order kept at the top level.
    #[arg(long)]
    pub nx_out: Option<usize>,
    #[arg(long)]
    pub ny_out: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SharpnessArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// First j at which the lower bound is checked.
    #[arg(long)]
    pub j0: Option<usize>,
    /// First j used by the order fit.
    #[arg(long)]
    pub j_min: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MajorantArgs {
    #[arg(long)]
    pub sigma: Option<String>,
    /// Scan for the largest admissible c.
    #[arg(long)]
    pub find_c: bool,
    #[arg(long = "kmax")]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub c1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_c: Option<String>,
    /// Largest index for the P2 and P3 checks.
    #[arg(long = "jmax")]
    pub j_max: Option<usize>,
    /// Also check the main estimate on KP-I jets.
    #[arg(long)]
    pub estimate: bool,
    #[arg(long)]
    pub estimate_j: Option<usize>,
    #[arg(long)]
    pub lm_max: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CombinatoricsArgs {
    #[arg(long = "lmax")]
    pub l_max: Option<usize>,
    #[arg(long = "mmax")]
    pub m_max: Option<usize>,
    #[arg(long = "jmax")]
    pub j_max: Option<usize>,
    #[arg(long = "nmax")]
    pub n_max: Option<usize>,
    /// Scan every triple and pair below the maxima.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long)]
    pub pascal_n: Option<usize>,
    #[arg(long)]
    pub pascal_t: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub lx: Option<f64>,
    #[arg(long)]
    pub ly: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectralArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Field file to evolve instead of a generated profile.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "T", alias = "t-end", allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_c: Option<f64>,
    #[arg(long)]
    pub dealias_fraction: Option<f64>,
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Drop the nonlinear term.
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(serialize_with = "phase_ser")]
    pub phase: Option<PhaseArg>,
    /// Exponential weight of the Gevrey and Bourgain norms.
    #[arg(long)]
    pub norm_delta: Option<f64>,
    #[arg(long)]
    pub s1: Option<f64>,
    #[arg(long)]
    pub s2: Option<f64>,
    /// Write every snapshot as a field file plus a trajectory index.
    #[arg(long)]
    pub write_fields: bool,
    #[arg(long)]
    pub l2_tol: Option<f64>,
    /// Smallest admissible delta_hat(t) / delta_hat(0).
    #[arg(long)]
    pub persistence: Option<f64>,
}

fn phase_ser<S: serde::Serializer>(p: &Option<PhaseArg>, s: S) -> Result<S::Ok, S::Error> {
    p.map(PhaseConvention::from).serialize(s)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProfileArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Also export the prescribed-derivative jet up to this x-order.
    #[arg(long)]
    pub jet_order: Option<usize>,
}
