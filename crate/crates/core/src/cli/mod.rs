//! Command-line interface: `bound`, `extend`, `verify` and `sweep`.
//!
//! Settings come from flags, then an optional TOML file (`--config`), then defaults. Exit
//! codes: 0 success, 1 a bound was violated, 2 invalid input or any other error, 3 the
//! bound is trivial and `--fail-on-trivial` was given.

mod commands;
mod output;
mod state_arg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::ffi::OsString;
use std::path::PathBuf;

pub use commands::{build_curve, cmd_bound, cmd_extend, cmd_sweep, cmd_verify, curve_for_extension, read_curve_table};
pub use output::{BOUND_CSV_SCHEMA, STATE_CSV_SCHEMA};
pub use state_arg::{expand_states, load_density_matrix, parse_state, StateArg};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_TRIVIAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cv-oodg", version, about = "Certified output-distance bounds for continuous-variable channels beyond the trusted energy range")]
pub struct Cli {
    /// Worker threads (falls back to CV_OODG_THREADS, then all cores).
    #[arg(long, global = true, env = "CV_OODG_THREADS")]
    pub threads: Option<usize>,
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a coherent-state bound curve on a grid of mean photon numbers.
    Bound(BoundArgs),
    /// Extend a curve to one input state.
    Extend(ExtendArgs),
    /// Run verification suites against exact oracles.
    Verify(VerifyArgs),
    /// Extend a curve to every (ε₀, state) pair of a grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Dominance,
    GammaClosedForm,
    MuNu,
    DeltaS,
    Concavity,
    Soundness,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Bound,
    Extend,
    Verify,
    Sweep,
}

#[derive(Debug, Args, Default)]
pub struct GuaranteeArgs {
    /// In-distribution error ε₀; a comma-separated list for `sweep`.
    #[arg(long, value_delimiter = ',')]
    pub eps0: Vec<f64>,
    /// Trusted amplitude τ.
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct CurveArgs {
    /// Curve class: step, lipschitz, gaussian, phase_rotation, squeezing, displacement,
    /// symmetric, cubic_phase, universal.
    #[arg(long, visible_alias = "curve")]
    pub class: Option<String>,
    /// Piecewise-linear curve from a bound CSV (columns nbar, epsilon), replacing `--class`.
    #[arg(long)]
    pub curve_table: Option<PathBuf>,
    /// Multiply the curve by this factor.
    #[arg(long)]
    pub curve_scale: Option<f64>,
    /// Take the pointwise minimum with the step bound.
    #[arg(long)]
    pub combined: bool,
}

#[derive(Debug, Args, Default)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct GridArgs {
    /// Largest mean photon number sampled (also the hull range for non-concave curves).
    #[arg(long)]
    pub nbar_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub guarantee: GuaranteeArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub guarantee: GuaranteeArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// classical:n̄, fock:m, spat:q, squeezed:λ, energy-only:n̄, known-fock:PATH, negativity:N,n+,n-
    #[arg(long)]
    pub state: Option<String>,
    /// Exit 3 when the bound is the trivial value 2.
    #[arg(long)]
    pub fail_on_trivial: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub guarantee: GuaranteeArgs,
    /// Channel-pair class: phase_rotation, displacement, squeezing, loss, or all.
    #[arg(long)]
    pub class: Option<String>,
    /// Curve to test instead of the curves matching each pair class.
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long)]
    pub curve_table: Option<PathBuf>,
    #[arg(long)]
    pub curve_scale: Option<f64>,
    #[arg(long)]
    pub combined: bool,
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random channel pairs per class.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub guarantee: GuaranteeArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Repeatable; integer ranges such as fock:0..4 expand inclusively.
    #[arg(long)]
    pub state: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }

    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Keys accepted in the `--config` file; names match the long flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    eps0: Option<OneOrMany<f64>>,
    tau: Option<f64>,
    class: Option<String>,
    curve: Option<String>,
    curve_table: Option<PathBuf>,
    curve_scale: Option<f64>,
    combined: Option<bool>,
    format: Option<Format>,
    output: Option<PathBuf>,
    nbar_max: Option<f64>,
    points: Option<usize>,
    state: Option<OneOrMany<String>>,
    fail_on_trivial: Option<bool>,
    suite: Option<Suite>,
    seed: Option<u64>,
    samples: Option<usize>,
    threads: Option<usize>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub command: CommandKind,
    pub eps0: Vec<f64>,
    pub tau: f64,
    /// Curve class (or pair class for `verify`).
    pub class_tag: String,
    /// `verify` only: curve overriding the matching curves.
    pub curve_tag: Option<String>,
    pub curve_table: Option<PathBuf>,
    pub curve_scale: Option<f64>,
    pub combined: bool,
    pub states: Vec<String>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub nbar_max: f64,
    pub points: usize,
    pub seed: u64,
    pub samples: usize,
    pub suite: Suite,
    pub fail_on_trivial: bool,
    pub threads: Option<usize>,
}

impl JobConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eps0.is_empty() {
            return Err(Error::Config("no eps0 values given".into()));
        }
        if self.command != CommandKind::Sweep && self.eps0.len() > 1 {
            return Err(Error::Config("only `sweep` accepts several eps0 values".into()));
        }
        if !(self.nbar_max > 0.0 && self.nbar_max.is_finite()) {
            return Err(Error::Config(format!("nbar-max must be positive, got {}", self.nbar_max)));
        }
        if self.points == 0 {
            return Err(Error::Config("points must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        if let Some(k) = self.curve_scale {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::Config(format!("curve-scale must be positive, got {k}")));
            }
        }
        match self.command {
            CommandKind::Extend if self.states.len() != 1 => Err(Error::Config("extend needs exactly one --state".into())),
            CommandKind::Sweep if self.states.is_empty() => Err(Error::Config("sweep needs at least one --state".into())),
            _ => Ok(()),
        }
    }
}

fn load_file(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn pick_vec<T: Clone>(flag: Vec<T>, file: Option<OneOrMany<T>>, default: Vec<T>) -> Vec<T> {
    if !flag.is_empty() {
        flag
    } else {
        file.map(OneOrMany::into_vec).unwrap_or(default)
    }
}

/// Merges flags, the config file and defaults.
pub fn resolve(cli: Cli) -> Result<JobConfig> {
    let file = load_file(&cli.config)?;
    let threads = cli.threads.or(file.threads);
    let mut job = JobConfig {
        command: CommandKind::Bound,
        eps0: Vec::new(),
        tau: 1.0,
        class_tag: String::new(),
        curve_tag: None,
        curve_table: None,
        curve_scale: None,
        combined: false,
        states: Vec::new(),
        output_path: None,
        format: Format::Csv,
        nbar_max: 20.0,
        points: 200,
        seed: 0,
        samples: 200,
        suite: Suite::All,
        fail_on_trivial: false,
        threads,
    };
    let file_class = file.class.clone().or(file.curve.clone());
    match cli.command {
        Command::Bound(a) => {
            job.command = CommandKind::Bound;
            common(&mut job, a.guarantee, a.curve, a.grid, a.output, &file, file_class, Format::Csv);
        }
        Command::Extend(a) => {
            job.command = CommandKind::Extend;
            common(&mut job, a.guarantee, a.curve, a.grid, a.output, &file, file_class, Format::Json);
            job.states = a.state.map(|s| vec![s]).unwrap_or_else(|| file.state.map(OneOrMany::into_vec).unwrap_or_default());
            job.fail_on_trivial = a.fail_on_trivial || file.fail_on_trivial.unwrap_or(false);
        }
        Command::Sweep(a) => {
            job.command = CommandKind::Sweep;
            common(&mut job, a.guarantee, a.curve, a.grid, a.output, &file, file_class, Format::Csv);
            job.states = pick_vec(a.state, file.state, Vec::new());
            job.seed = pick(a.seed, file.seed, 0);
        }
        Command::Verify(a) => {
            job.command = CommandKind::Verify;
            job.eps0 = pick_vec(a.guarantee.eps0, file.eps0, vec![0.1]);
            job.tau = pick(a.guarantee.tau, file.tau, 1.0);
            job.class_tag = pick(a.class, file.class, "all".into());
            job.curve_tag = a.curve.or(file.curve);
            job.curve_table = a.curve_table.or(file.curve_table);
            job.curve_scale = a.curve_scale.or(file.curve_scale);
            job.combined = a.combined || file.combined.unwrap_or(false);
            job.suite = pick(a.suite, file.suite, Suite::All);
            job.seed = pick(a.seed, file.seed, 0);
            job.samples = pick(a.samples, file.samples, 200);
            job.output_path = a.output.or(file.output);
            job.format = Format::Json;
        }
    }
    job.validate()?;
    Ok(job)
}

#[allow(clippy::too_many_arguments)]
fn common(
    job: &mut JobConfig,
    g: GuaranteeArgs,
    c: CurveArgs,
    grid: GridArgs,
    out: OutputArgs,
    file: &FileConfig,
    file_class: Option<String>,
    default_format: Format,
) {
    job.eps0 = pick_vec(g.eps0, file.eps0.as_ref().map(|e| OneOrMany::Many(e.to_vec())), vec![0.1]);
    job.tau = pick(g.tau, file.tau, 1.0);
    job.class_tag = pick(c.class, file_class, "phase_rotation".into());
    job.curve_table = c.curve_table.or(file.curve_table.clone());
    job.curve_scale = c.curve_scale.or(file.curve_scale);
    job.combined = c.combined || file.combined.unwrap_or(false);
    job.nbar_max = pick(grid.nbar_max, file.nbar_max, 20.0);
    job.points = pick(grid.points, file.points, 200);
    job.format = pick(out.format, file.format, default_format);
    job.output_path = out.output.or(file.output.clone());
}


/// Runs one invocation and returns the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let job = match resolve(cli) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(job.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return EXIT_INVALID;
        }
    };
    let result = pool.install(|| match job.command {
        CommandKind::Bound => cmd_bound(&job),
        CommandKind::Extend => cmd_extend(&job),
        CommandKind::Verify => cmd_verify(&job),
        CommandKind::Sweep => cmd_sweep(&job),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}
