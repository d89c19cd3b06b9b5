//! Command-line arguments and their conversion into library types.

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mgregion_core::netmodel::{build_hex, build_wyner, TopoKind, Topology};
use mgregion_core::scheduler::Scheme;
use mgregion_core::traffic::{ArrivalModel, Coop, Depth, ScenarioParams};

#[derive(Debug, Parser)]
#[command(name = "mgregion", version, about = "MG region bounds, schedules and Monte Carlo checks for URLLC/eMBB networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Inner and outer MG regions with their slope coefficients.
    Region(RegionArgs),
    /// Monte Carlo estimate compared against the analytic boundary point.
    Simulate(SimulateArgs),
    /// Identity, series, schedule-validity and region-nesting checks.
    Verify(VerifyArgs),
    /// Coefficient table over a parameter grid.
    Sweep(SweepArgs),
    /// Adjacency (and colouring, on the torus) of a topology.
    Topology(TopologyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TopoArg {
    Wyner,
    Hex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoopArg {
    Both,
    Rx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ModelArg {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeArg {
    Adaptive,
    Nonadaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyPart {
    Identities,
    Series,
    Schedules,
    Regions,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DepthArgs {
    /// Number of cooperation rounds (even).
    #[arg(long = "D", conflicts_with = "dinf")]
    pub d: Option<u32>,
    /// Unbounded cooperation.
    #[arg(long = "Dinf")]
    pub dinf: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScenarioArgs {
    #[arg(long, value_enum, default_value = "wyner")]
    pub topo: TopoArg,
    #[arg(long, value_enum, default_value = "both")]
    pub coop: CoopArg,
    #[arg(long, value_enum, default_value = "1")]
    pub model: ModelArg,
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub rhof: f64,
    #[command(flatten)]
    pub depth: DepthArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RegionArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SizeArgs {
    /// Users on the Wyner line.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Torus width.
    #[arg(long = "W")]
    pub w: Option<usize>,
    /// Torus height.
    #[arg(long = "H")]
    pub h: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub size: SizeArgs,
    #[arg(long, value_enum, default_value = "adaptive")]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads. Results do not depend on it, so it is not echoed.
    #[arg(long, default_value_t = 1)]
    #[serde(skip)]
    pub workers: usize,
    #[arg(long = "k-sigma", default_value_t = 4.0)]
    pub k_sigma: f64,
    /// Emit the realization and tally of this trial instead of an estimate.
    #[arg(long = "dump-trial", conflicts_with = "replay")]
    pub dump_trial: Option<u64>,
    /// Re-schedule a logged realization and check its tally.
    #[arg(long)]
    pub replay: Option<std::path::PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Run only one group of checks.
    #[arg(long, value_enum)]
    pub only: Option<VerifyPart>,
    /// Tail tolerance that sets the truncation length of identity sums.
    #[arg(long = "terms-tail", default_value_t = 1e-13)]
    pub terms_tail: f64,
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Test fixture: flips the sign of one identity's closed form.
    #[arg(long = "inject-sign-flip", hide = true)]
    pub inject_sign_flip: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "wyner")]
    pub topo: TopoArg,
    #[arg(long, value_enum, default_value = "both")]
    pub coop: CoopArg,
    #[arg(long, value_enum, default_value = "1")]
    pub model: ModelArg,
    #[arg(long = "rho-list", value_delimiter = ',', required = true)]
    pub rho_list: Vec<f64>,
    #[arg(long = "rhof-list", value_delimiter = ',', required = true)]
    pub rhof_list: Vec<f64>,
    /// Cooperation rounds; use `inf` for unbounded cooperation.
    #[arg(long = "D-list", value_delimiter = ',', default_value = "inf")]
    pub d_list: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TopologyArgs {
    #[arg(long, value_enum, default_value = "wyner")]
    pub topo: TopoArg,
    #[command(flatten)]
    pub size: SizeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl TopoArg {
    pub fn kind(self) -> TopoKind {
        match self {
            TopoArg::Wyner => TopoKind::Wyner,
            TopoArg::Hex => TopoKind::Hex,
        }
    }
}

impl CoopArg {
    pub fn coop(self) -> Coop {
        match self {
            CoopArg::Both => Coop::TxRx,
            CoopArg::Rx => Coop::RxOnly,
        }
    }
}

impl ModelArg {
    pub fn model(self) -> ArrivalModel {
        match self {
            ModelArg::One => ArrivalModel::Model1,
            ModelArg::Two => ArrivalModel::Model2,
        }
    }
}

impl SchemeArg {
    pub fn scheme(self, coop: Coop) -> Scheme {
        Scheme::from_parts(self == SchemeArg::Adaptive, coop)
    }
}

/// Validation failures map to exit code 2.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Invalid(msg.into()).into())
}

pub fn depth_of(topo: TopoArg, d: &DepthArgs) -> Result<Depth> {
    match (d.d, d.dinf, topo) {
        (Some(d), _, TopoArg::Wyner) => Ok(Depth::Finite(d)),
        (None, true, _) | (None, false, TopoArg::Hex) => Ok(Depth::Infinite),
        (Some(_), _, TopoArg::Hex) => invalid("the torus bounds assume unbounded cooperation; use --Dinf"),
        (None, false, TopoArg::Wyner) => invalid("give --D <rounds> or --Dinf"),
    }
}

pub fn parse_depth(s: &str) -> Result<Depth> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(Depth::Infinite);
    }
    match s.parse::<u32>() {
        Ok(d) => Ok(Depth::Finite(d)),
        Err(_) => invalid(format!("cannot read cooperation rounds {s:?}")),
    }
}

pub fn scenario(args: &ScenarioArgs) -> Result<ScenarioParams> {
    let depth = depth_of(args.topo, &args.depth)?;
    to_valid(ScenarioParams::new(args.rho, args.rhof, depth, args.model.model(), args.coop.coop()))
}

/// Turns library validation errors into exit-code-2 failures.
pub fn to_valid<T>(r: mgregion_core::Result<T>) -> Result<T> {
    r.map_err(|e| Invalid(e.to_string()).into())
}

pub fn topology(topo: TopoArg, size: &SizeArgs) -> Result<Topology> {
    match topo {
        TopoArg::Wyner => {
            if size.w.is_some() || size.h.is_some() {
                bail!(Invalid("--W/--H apply to the torus; use --K for the Wyner line".into()));
            }
            let Some(k) = size.k else {
                return invalid("the Wyner line needs --K");
            };
            to_valid(build_wyner(k))
        }
        TopoArg::Hex => {
            if size.k.is_some() {
                return invalid("--K applies to the Wyner line; use --W and --H for the torus");
            }
            let (Some(w), Some(h)) = (size.w, size.h) else {
                return invalid("the torus needs --W and --H");
            };
            to_valid(build_hex(w, h))
        }
    }
}
