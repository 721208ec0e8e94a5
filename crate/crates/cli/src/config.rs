use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, FromArgMatches, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thermoform_core::config::MapSpec;

/// Defaults of an argument group, taken from its clap declaration so the
/// command line and JSON configs cannot drift apart.
fn clap_defaults<T: Args + FromArgMatches>() -> T {
    let cmd = T::augment_args(clap::Command::new("defaults").no_binary_name(true));
    let matches = cmd.try_get_matches_from(std::iter::empty::<String>()).expect("argument groups have defaults");
    T::from_arg_matches(&matches).expect("argument groups have defaults")
}

macro_rules! defaults_from_clap {
    ($($t:ty),*) => {
        $(impl Default for $t {
            fn default() -> Self {
                clap_defaults()
            }
        })*
    };
}

/// `a,b` on the command line, `[a, b]` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pair(pub [f64; 2]);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        let [a, b] = parts.as_slice() else {
            return Err(format!("expected `a,b`, got `{s}`"));
        };
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        Ok(Pair([parse(a)?, parse(b)?]))
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0[0], self.0[1])
    }
}

#[derive(Debug, Parser)]
#[command(name = "thermoform", version, about = "Thermodynamic formalism experiments for inner functions, shifts and parabolic maps")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Map as inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    pub map: Option<String>,
    /// Seed for `clt` and random `nevanlinna` points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "THERMO_THREADS")]
    pub threads: Option<usize>,
    /// Artifact path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Leading eigenvalue, gap and residual of the transfer operator along a list of s (spectral identity λ = 1 at s = 1, Koenigs spectrum of the gap).
    Spectrum(SpectrumArgs),
    /// Pressure P(t) and its first two derivatives against ∫g dm and the Green–Kubo variance.
    Pressure(PressureArgs),
    /// Backward-orbit counting N(T) against the e^T m(B)/Λ asymptotic, with optional Cesàro column.
    Count(CountArgs),
    /// Direct and Cesàro-averaged counting ratios on a fine T grid (lattice case).
    Cesaro(CesaroArgs),
    /// Birkhoff-sum central limit theorem: Monte Carlo variance and KS distance against Green–Kubo.
    Clt(CltArgs),
    /// Atoms of the Aleksandrov–Clark measure μ_α.
    Clark(ClarkArgs),
    /// Nevanlinna counting function against log(1/|w|).
    Nevanlinna(NevanlinnaArgs),
    /// Word counting on a symbolic system with a cylinder target set.
    ShiftCount(ShiftCountArgs),
    /// Lattice / D-generic verdict from periodic Birkhoff sums.
    DGeneric(DGenericArgs),
    /// Poincaré series η(s) by direct summation and by the resolvent.
    Eta(EtaArgs),
    /// Kac identity for the first-return map of a doubly parabolic map.
    Kac(KacArgs),
    /// Orbit counting for the induced first-return system.
    ParabolicCount(ParabolicCountArgs),
    /// Hölder modulus of s ↦ L_{s,q} on the critical line.
    HolderMod(HolderModArgs),
    /// Re-run a saved experiment configuration.
    #[serde(skip)]
    Run(RunArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumArgs {
    /// Points `re,im`, repeatable.
    #[arg(long = "s", default_values = ["1,0"])]
    pub s: Vec<Pair>,
    /// Fourier modes.
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Observable g in `s - ψ + g` form, e.g. `cos` or `0.5cos2+sin`.
    #[arg(long, default_value = "0")]
    pub obs: String,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PressureArgs {
    #[arg(long, default_value = "cos")]
    pub obs: String,
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountArgs {
    /// Seed angle x.
    #[arg(long, default_value_t = 0.7)]
    pub x: f64,
    #[arg(long = "T", default_value_t = 12.0)]
    pub t: f64,
    /// Grid spacing of the report.
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    /// Count S_n < T instead of S_n ≤ T.
    #[arg(long, conflicts_with = "closed")]
    pub strict: bool,
    /// Count S_n ≤ T (the default).
    #[arg(long)]
    pub closed: bool,
    /// Arc `a,b` of the target set B, repeatable; the full circle when absent.
    #[arg(long = "arc")]
    pub arcs: Vec<Pair>,
    /// Fill the Cesàro column.
    #[arg(long)]
    pub cesaro: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CesaroArgs {
    #[arg(long, default_value_t = 0.7)]
    pub x: f64,
    #[arg(long = "T", default_value_t = 30.0)]
    pub t: f64,
    /// First T of the report.
    #[arg(long, default_value_t = 20.0)]
    pub from: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long = "arc")]
    pub arcs: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CltArgs {
    #[arg(long, default_value = "cos")]
    pub obs: String,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Correlation lags in the Green–Kubo sum.
    #[arg(long, default_value_t = 64)]
    pub kmax: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClarkArgs {
    /// Angle of α on the circle.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NevanlinnaArgs {
    /// Points `re,im` in the punctured disk, repeatable.
    #[arg(long = "w")]
    pub w: Vec<Pair>,
    /// Additional seeded random points.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftCountArgs {
    /// Leading letters of the seed ξ, comma separated.
    #[arg(long, default_value = "1")]
    pub xi: String,
    #[arg(long = "T", default_value_t = 10.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    /// Cylinder word of B, repeatable; every word counts when absent.
    #[arg(long = "cylinder")]
    pub cylinders: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DGenericArgs {
    #[arg(long, default_value_t = 8)]
    pub max_period: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EtaArgs {
    #[arg(long = "s", default_value = "2,0")]
    pub s: Pair,
    /// Seed word ξ for symbolic systems.
    #[arg(long, default_value = "1")]
    pub xi: String,
    /// Seed angle for circle maps.
    #[arg(long, default_value_t = 0.7)]
    pub x: f64,
    /// Fourier modes for circle maps.
    #[arg(long, default_value_t = 128)]
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KacArgs {
    /// Partition level N.
    #[arg(long, default_value_t = 5)]
    pub level: usize,
    #[arg(long, default_value_t = 16)]
    pub quad_points: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParabolicCountArgs {
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, default_value_t = 0.3)]
    pub x: f64,
    #[arg(long = "T", default_value_t = 11.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    /// Interval `a,b` of B, repeatable.
    #[arg(long = "interval", default_values = ["-1,1"])]
    pub intervals: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolderModArgs {
    /// Power q in L_{s,q}.
    #[arg(long, default_value_t = 0.0)]
    pub q: f64,
    #[arg(long, default_value = "1,0")]
    pub s0: Pair,
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RunArgs {
    /// Experiment configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
}

defaults_from_clap!(
    SpectrumArgs,
    PressureArgs,
    CountArgs,
    CesaroArgs,
    CltArgs,
    ClarkArgs,
    NevanlinnaArgs,
    ShiftCountArgs,
    DGenericArgs,
    EtaArgs,
    KacArgs,
    ParabolicCountArgs,
    HolderModArgs
);

/// One fully specified experiment. Thread count and output path only steer
/// execution and are left out of the embedded config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub map: MapSpec,
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Pressure(_) => "pressure",
            Command::Count(_) => "count",
            Command::Cesaro(_) => "cesaro",
            Command::Clt(_) => "clt",
            Command::Clark(_) => "clark",
            Command::Nevanlinna(_) => "nevanlinna",
            Command::ShiftCount(_) => "shift-count",
            Command::DGeneric(_) => "d-generic",
            Command::Eta(_) => "eta",
            Command::Kac(_) => "kac",
            Command::ParabolicCount(_) => "parabolic-count",
            Command::HolderMod(_) => "holder-mod",
            Command::Run(_) => "run",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Command::Clt(_)) || matches!(self, Command::Nevanlinna(a) if a.random > 0)
    }
}
