use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lpproj", version, about = "Metric projections in l_p and discrete L_p spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project a point onto a ball, cylinder, positive cone or line.
    Project(ProjectArgs),
    /// Closed-form Fréchet derivative of a ball or cylinder projection.
    Derive(DeriveArgs),
    /// Directional derivative at a boundary point, with a finite-difference comparison.
    Gateaux(GateauxArgs),
    /// Fréchet residual ratios as CSV (`h,max_ratio`).
    Residual(ResidualArgs),
    /// Run a named non-differentiability or counterexample witness.
    Witness(WitnessArgs),
    /// Run the randomized property suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetKind {
    Ball,
    Cylinder,
    Cone,
    Line,
}

#[derive(Debug, Clone, Args)]
pub struct TargetArgs {
    #[arg(long, value_enum)]
    pub target: TargetKind,
    /// Radius of the ball or cylinder.
    #[arg(long = "r", default_value_t = 1.0)]
    pub r: f64,
    #[arg(long = "p", default_value_t = 2.0)]
    pub p: f64,
    /// Constrained coordinates of a cylinder: comma list or "all".
    #[arg(long = "M")]
    pub mask: Option<String>,
    /// Spanning vector of a line.
    #[arg(long)]
    pub base: Option<String>,
    /// Built-in measure space for cone inputs.
    #[arg(long, default_value = "geo16")]
    pub space: String,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Sequence input: JSON `[[i, v], ...]`, `[v1, v2, ...]`, or `@file`.
    #[arg(long)]
    pub x: Option<String>,
    /// Step-function input for the cone: one value per atom, or `@file`.
    #[arg(long)]
    pub f: Option<String>,
    /// Random target points used to report the variational margin; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DeriveArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Base point of the derivative.
    #[arg(long)]
    pub x: Option<String>,
    /// Optional direction to apply the operator to.
    #[arg(long)]
    pub w: Option<String>,
    /// Random linearity and norm probes.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GateauxArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Boundary point (ball, cylinder).
    #[arg(long)]
    pub x: Option<String>,
    /// Direction (ball, cylinder).
    #[arg(long)]
    pub w: Option<String>,
    /// Base function (cone).
    #[arg(long)]
    pub f: Option<String>,
    /// Direction function (cone).
    #[arg(long)]
    pub g: Option<String>,
    /// Comma list of decreasing finite-difference steps.
    #[arg(long = "h-schedule", default_value = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6")]
    pub h_schedule: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Base point off the boundary.
    #[arg(long)]
    pub x: Option<String>,
    /// Number of random unit directions.
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "h-schedule", default_value = "1e-2,1e-3,1e-4,1e-5,1e-6")]
    pub h_schedule: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WitnessName {
    /// Split coefficient versus the true line projection.
    #[value(name = "line-split", alias = "prop2.5")]
    LineSplit,
    /// Two tangent vectors whose midpoint-type combination is not tangent.
    #[value(name = "null-cone", alias = "lemma2.6")]
    NullCone,
    /// Line projection fails to be additive.
    #[value(name = "line-nonlinear", alias = "cor2.7")]
    LineNonlinear,
    /// Radial quotients at a sphere point.
    Sphere,
    /// Radial quotients along the constrained part of a cylinder point.
    Cylinder,
    /// Remainder ratios at a member of the positive cone.
    #[value(name = "cone-in-k", alias = "cone-inK")]
    ConeInK,
    /// Remainder ratios at a function outside the positive cone.
    #[value(name = "cone-out-k", alias = "cone-outK")]
    ConeOutK,
    /// A nearby function outside the cone.
    EmptyInterior,
}

#[derive(Debug, Clone, Args)]
pub struct WitnessArgs {
    #[arg(value_enum)]
    pub name: WitnessName,
    #[arg(long = "r", default_value_t = 1.0)]
    pub r: f64,
    #[arg(long = "p")]
    pub p: Option<f64>,
    #[arg(long = "M")]
    pub mask: Option<String>,
    /// Boundary point for the sphere and cylinder witnesses.
    #[arg(long)]
    pub base: Option<String>,
    #[arg(long, default_value = "geo16")]
    pub space: String,
    /// Function for the cone witnesses; defaults depend on the witness.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Number of nested perturbation sets.
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    #[arg(long = "h-schedule", default_value = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6")]
    pub h_schedule: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace every property tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Comma list of exponents.
    #[arg(long = "p", default_value = "1.5,2,3,4")]
    pub p: String,
    /// Random trials per property and exponent.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 4)]
    pub threads: usize,
    #[command(flatten)]
    pub out: OutArgs,
}
