use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use proxgrowth::subharmonic::Normalization;
use proxgrowth::DerivMode;

#[derive(Debug, Parser)]
#[command(
    name = "proxgrowth",
    version,
    about = "Proximate growth functions on sampled log-log data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a function is a model growth function.
    ValidateModel(ValidateArgs),
    /// Compare both characterisations of a proximate growth function.
    Check(CheckArgs),
    /// Check a candidate proximate order and the function r^rho(r) it induces.
    Valiron(ValironArgs),
    /// Build a proximate growth function V with limsup A/V = 1.
    Construct(ConstructArgs),
    /// Circle, disk and maximum means of a subharmonic function.
    Means(MeansArgs),
    /// Limit and limsup of a raw track.
    Limits(LimitsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ValidateModel(_) => "validate-model",
            Command::Check(_) => "check",
            Command::Valiron(_) => "valiron",
            Command::Construct(_) => "construct",
            Command::Means(_) => "means",
            Command::Limits(_) => "limits",
        }
    }
}

/// Grid in `x = ln r`. Sampled inputs bring their own grid.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 1e4, allow_negative_numbers = true)]
    pub x1: f64,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalysisArgs {
    /// Tolerance of the limit estimator.
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
    /// auto, exact or numeric.
    #[arg(long, default_value = "auto")]
    pub deriv: DerivMode,
    /// Also write the report to this file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    /// Candidate model, a catalog spec or csv:path[#col].
    #[arg(long)]
    pub m: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub analysis: AnalysisArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long)]
    pub v: String,
    #[arg(long)]
    pub m: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub analysis: AnalysisArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValironArgs {
    /// const:c=.., loglog:rho=..,b=.., sinlog:rho=..,a=.. or csv:path[#col].
    #[arg(long)]
    pub rho: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub analysis: AnalysisArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConstructArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub m: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub analysis: AnalysisArgs,
    /// Smoothing window as a fraction of the ln M range.
    #[arg(long, default_value_t = 0.02)]
    pub window: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub touch_tol: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub construct_tol: f64,
    /// Write x,lnA,lnV,rho_m rows to this file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeansArgs {
    /// Plane function, e.g. logabs:a=1 or max(re;abs2).
    #[arg(long)]
    pub u: String,
    /// Smallest radius.
    #[arg(long, default_value_t = 0.1353352832366127)]
    pub r0: f64,
    /// Largest radius.
    #[arg(long, default_value_t = 54.598150033144236)]
    pub r1: f64,
    /// Number of log-spaced radii.
    #[arg(long, default_value_t = 64)]
    pub nr: usize,
    /// area or paper.
    #[arg(long, default_value = "area")]
    pub normalization: Normalization,
    #[arg(long, default_value_t = 1024)]
    pub n_quad: usize,
    #[arg(long, default_value_t = 64)]
    pub n_radial: usize,
    #[arg(long, default_value_t = 1024)]
    pub n_scan: usize,
    /// Constant added to u.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub shift: f64,
    /// Write r,c,b,m,normalization rows to this file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LimitsArgs {
    /// csv:path[#col] holding x and a value column.
    #[arg(long)]
    pub track: String,
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
    /// Fraction of the track used as the tail window.
    #[arg(long, default_value_t = 0.5)]
    pub tail_fraction: f64,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
}
