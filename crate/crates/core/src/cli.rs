//! Command-line interface: `solve`, `ransac`, `synth`, `stability` and
//! `enum`.
//!
//! Exit codes: 0 on success, 1 on usage, input or configuration errors, 2
//! when the input is valid but no pose was found.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::enumerate::enumerate_configs;
use crate::equations::EquationError;
use crate::io::{stability_csv, to_json, write_text, EnumReport, IoError, ProblemFile, RansacReport, SolveReport};
use crate::minimal::{auto_kind, solve_detailed, MinimalError, SolverKind};
use crate::ransac::{run_ransac, Aggregation, RansacConfig, RansacError, Sampler};
use crate::solver::{Backend, SolverConfig};
use crate::synth::{
    make_instance, run_stability_experiment, success_rate, Motion, Pairing, Scenario, SceneConfig,
};

#[derive(Debug, Parser)]
#[command(name = "sixpt", version, about = "Six-point relative pose for multi-camera systems")]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a minimal problem of six correspondences.
    Solve(SolveArgs),
    /// Robust estimation over many correspondences.
    Ransac(RansacArgs),
    /// Generate a synthetic problem file.
    Synth(SynthArgs),
    /// Noise-free stability experiment; writes per-trial log10 errors as CSV.
    Stability(StabilityArgs),
    /// Enumerate correspondence configurations with a given number of edges.
    Enum(EnumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    Auto,
    Generic,
    Inter56,
    Inter48,
    Intra,
}

impl SolverChoice {
    fn kind(self) -> Option<SolverKind> {
        match self {
            Self::Auto => None,
            Self::Generic => Some(SolverKind::Generic64),
            Self::Inter56 => Some(SolverKind::Inter56),
            Self::Inter48 => Some(SolverKind::Inter48),
            Self::Intra => Some(SolverKind::Intra48),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendChoice {
    Nullspace,
    Homotopy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioChoice {
    /// Two pinhole cameras on a vehicle-style rig.
    Rig,
    /// Generalized camera of omnidirectional cameras.
    Generalized,
}

impl From<ScenarioChoice> for Scenario {
    fn from(s: ScenarioChoice) -> Self {
        match s {
            ScenarioChoice::Rig => Scenario::TwoCameraRig,
            ScenarioChoice::Generalized => Scenario::GeneralizedCamera,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
    pub solver: SolverChoice,
    #[arg(long, value_enum, default_value_t = BackendChoice::Nullspace)]
    pub backend: BackendChoice,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RansacArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
    pub solver: SolverChoice,
    #[arg(long, default_value_t = 0.1)]
    pub threshold_deg: f64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    #[arg(long, default_value_t = 20_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Combine the two per-view angular errors by their maximum or sum.
    #[arg(long, value_enum, default_value_t = AggregationChoice::Max)]
    pub aggregation: AggregationChoice,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregationChoice {
    Max,
    Sum,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scene configuration as JSON; flags given explicitly override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioChoice>,
    #[arg(long, value_enum)]
    pub pairing: Option<PairingChoice>,
    #[arg(long, value_enum)]
    pub motion: Option<MotionChoice>,
    #[arg(long)]
    pub noise_px: Option<f64>,
    #[arg(long)]
    pub num_pcs: Option<usize>,
    #[arg(long)]
    pub outlier_ratio: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingChoice {
    Intra,
    Inter,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MotionChoice {
    Forward,
    Sideways,
    Random,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long, value_enum, default_value_t = ScenarioChoice::Generalized)]
    pub scenario: ScenarioChoice,
    #[arg(long, value_enum, default_value_t = SolverChoice::Intra)]
    pub solver: SolverChoice,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=7))]
    pub edges: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Minimal(#[from] MinimalError),
    #[error(transparent)]
    Ransac(#[from] RansacError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NoSolution(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NoSolution(_) | CliError::Ransac(RansacError::NoModelFound) => 2,
            _ => 1,
        }
    }
}

/// Parses arguments and runs the command, returning the process exit code.
/// Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    }
}

fn dispatch(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Solve(a) => cmd_solve(a),
        Command::Ransac(a) => cmd_ransac(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Stability(a) => cmd_stability(a),
        Command::Enum(a) => cmd_enum(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_text(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn cmd_solve(a: &SolveArgs) -> Result<(), CliError> {
    let file = ProblemFile::load(&a.input)?;
    let rig = file.rig()?;
    let pcs = file.correspondences()?;
    if pcs.len() != 6 {
        return Err(MinimalError::from(EquationError::WrongCount(pcs.len())).into());
    }
    let kind = match a.solver.kind() {
        Some(k) => k,
        None => auto_kind(&pcs)?,
    };
    let cfg = SolverConfig {
        backend: match a.backend {
            BackendChoice::Nullspace => Backend::NullSpace,
            BackendChoice::Homotopy => Backend::Homotopy,
        },
        ..Default::default()
    };
    let sol = solve_detailed(&pcs, &rig, kind, &cfg)?;
    let report = SolveReport::from(&sol);
    emit(a.out.as_deref(), &to_json(&report)?)?;
    if sol.poses.is_empty() {
        return Err(CliError::NoSolution(format!("{kind} solver found no real pose")));
    }
    Ok(())
}

/// Most specialized solver the data can feed: intra-camera triples first,
/// then inter-camera triples, then six distinct camera pairs.
fn ransac_kind(pcs: &[crate::geometry::RayCorrespondence]) -> Result<SolverKind, RansacError> {
    let mut last = None;
    for kind in [SolverKind::Intra48, SolverKind::Inter48, SolverKind::Generic64] {
        match Sampler::new(pcs, kind) {
            Ok(_) => return Ok(kind),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one solver was tried"))
}

pub fn cmd_ransac(a: &RansacArgs) -> Result<(), CliError> {
    let file = ProblemFile::load(&a.input)?;
    let rig = file.rig()?;
    let pcs = file.correspondences()?;
    let cfg = RansacConfig {
        confidence: a.confidence,
        max_iterations: a.max_iters,
        threshold_deg: a.threshold_deg,
        aggregation: match a.aggregation {
            AggregationChoice::Max => Aggregation::Max,
            AggregationChoice::Sum => Aggregation::Sum,
        },
        seed: a.seed,
        ..Default::default()
    };
    cfg.validate()?;
    let kind = match a.solver.kind() {
        Some(k) => k,
        None => ransac_kind(&pcs)?,
    };
    let result = run_ransac(&pcs, &rig, kind, &cfg)?;
    emit(a.out.as_deref(), &to_json(&RansacReport::new(kind.name(), &result))?)
}

pub fn cmd_synth(a: &SynthArgs) -> Result<(), CliError> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| IoError::File {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str::<SceneConfig>(&text).map_err(IoError::from)?
        }
        None => SceneConfig::default(),
    };
    if let Some(s) = a.scenario {
        cfg.scenario = s.into();
    }
    if let Some(p) = a.pairing {
        cfg.pairing = match p {
            PairingChoice::Intra => Pairing::Intra,
            PairingChoice::Inter => Pairing::Inter,
            PairingChoice::Generic => Pairing::Generic,
        };
    }
    if let Some(m) = a.motion {
        cfg.motion = match m {
            MotionChoice::Forward => Motion::Forward,
            MotionChoice::Sideways => Motion::Sideways,
            MotionChoice::Random => Motion::Random,
        };
    }
    if let Some(v) = a.noise_px {
        cfg.noise_px = v;
    }
    if let Some(v) = a.num_pcs {
        cfg.num_pcs = v;
    }
    if let Some(v) = a.outlier_ratio {
        cfg.outlier_ratio = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if !(0.0..1.0).contains(&cfg.outlier_ratio) {
        return Err(CliError::Usage(format!(
            "outlier ratio must be in [0, 1) (got {})",
            cfg.outlier_ratio
        )));
    }
    if cfg.num_pcs == 0 {
        return Err(CliError::Usage("at least one correspondence is required".into()));
    }
    let inst = make_instance(&cfg);
    emit(a.out.as_deref(), &to_json(&ProblemFile::from_instance(&inst))?)
}

pub fn cmd_stability(a: &StabilityArgs) -> Result<(), CliError> {
    let kind = a
        .solver
        .kind()
        .ok_or_else(|| CliError::Usage("stability needs an explicit solver".into()))?;
    let trials = run_stability_experiment(kind, a.scenario.into(), a.trials, a.seed, &SolverConfig::default());
    emit(a.out.as_deref(), &stability_csv(&trials))?;
    let solved = trials.iter().filter(|t| t.solved).count();
    eprintln!(
        "{kind}: {solved}/{} solved, p(eps < 1e-3) = {:.3}, p(eps < 1e-6) = {:.3}",
        trials.len(),
        success_rate(&trials, 1e-3, 1e-3),
        success_rate(&trials, 1e-6, 1e-6),
    );
    Ok(())
}

pub fn cmd_enum(a: &EnumArgs) -> Result<(), CliError> {
    let n = a.edges as usize;
    let graphs = enumerate_configs(n);
    let report = EnumReport::new(n, &graphs);
    emit(a.out.as_deref(), &to_json(&report)?)?;
    eprintln!("{} distinct configurations with {n} edges", report.total);
    Ok(())
}
