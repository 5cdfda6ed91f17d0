//! Command implementations for the `prelog` binary.
//!
//! Each command returns its stdout text and exit code so it can be driven
//! from tests without spawning a process.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use prelog_core::channel::{sample_power_input, simulate_block, BlockSample};
use prelog_core::checks::{self, merge_reports, CheckReport};
use prelog_core::duality::{db_to_linear, sweep_and_fit_with, BoundCurve};
use prelog_core::matrix::MatrixJson;
use prelog_core::mc::{map_chunks, DEFAULT_CHUNK};
use prelog_core::prelog::{optimal_antennas, PrelogReport};
use prelog_core::property_a::{check_property_a, PropertyAReport, DEFAULT_REL_TOL};
use prelog_core::rng::{sample_cn_vec, sample_gaussian_matrix};
use prelog_core::{CorrelationRoot, Error, Execution, InputKind, RngStream};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const THREADS_ENV: &str = "PRELOG_BENCH_THREADS";

#[derive(Debug, Parser)]
#[command(name = "prelog", version, about = "Pre-log bounds and duality-bound experiments for correlated block-fading SIMO channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper and lower pre-log for (N, Q, M).
    Prelog(PrelogArgs),
    /// Smallest number of receive antennas reaching the 1 - 1/N cap.
    Antennas(AntennasArgs),
    /// Certify Property (A) for a correlation root.
    CheckPa(CheckPaArgs),
    /// Duality-bound sweep over an SNR grid with slope fit.
    BoundSweep(SweepArgs),
    /// Export simulated channel blocks as JSON lines.
    Simulate(SimulateArgs),
    /// Run the numerical verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputArg {
    Sphere,
    Gaussian,
    Zero,
}

impl From<InputArg> for InputKind {
    fn from(a: InputArg) -> Self {
        match a {
            InputArg::Sphere => InputKind::Sphere,
            InputArg::Gaussian => InputKind::Gaussian,
            InputArg::Zero => InputKind::Zero,
        }
    }
}

#[derive(Debug, Args)]
pub struct PrelogArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub m: usize,
    /// Root to certify; without it the lower bound assumes Property (A).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
}

#[derive(Debug, Args)]
pub struct AntennasArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub q: usize,
}

#[derive(Debug, Args)]
pub struct CheckPaArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// SNR grid in dB.
    #[arg(long, value_delimiter = ',', default_value = "40,45,50,55,60")]
    pub rho_db: Vec<f64>,
    /// Monte Carlo samples per grid point.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InputArg::Sphere)]
    pub input: InputArg,
    /// CSV destination; the JSON summary goes to stdout.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, hide = true, default_value_t = 0, allow_negative_numbers = true)]
    pub jacobian_exponent_offset: i32,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value = "20")]
    pub rho_db: f64,
    /// Number of blocks.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InputArg::Sphere)]
    pub input: InputArg,
    /// Correlation root; defaults to all-ones for Q = 1 and a seeded random
    /// root otherwise.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// JSON-lines destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Base sample count; checks with a higher floor use their floor.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, hide = true, default_value_t = 0, allow_negative_numbers = true)]
    pub jacobian_exponent_offset: i32,
}

/// Text for stdout plus the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: EXIT_OK }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Prelog(a) => {
            let out = cmd_prelog(a.n, a.q, a.m, a.matrix.as_deref(), a.rel_tol)?;
            Ok(Outcome::ok(to_json(&out)?))
        }
        Command::Antennas(a) => Ok(Outcome::ok(format!("{}\n", cmd_antennas(a.n, a.q)?))),
        Command::CheckPa(a) => {
            let rep = cmd_check_pa(&a.matrix, a.m, a.rel_tol)?;
            let code = if rep.holds { EXIT_OK } else { EXIT_FAIL };
            Ok(Outcome { stdout: to_json(&rep)?, code })
        }
        Command::BoundSweep(a) => {
            let summary = cmd_bound_sweep(&a)?;
            Ok(Outcome::ok(to_json(&summary)?))
        }
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Verify(a) => {
            let reports = cmd_verify(a.seed, a.samples, a.jacobian_exponent_offset)?;
            let code = if reports.iter().all(CheckReport::passed) { EXIT_OK } else { EXIT_FAIL };
            Ok(Outcome { stdout: to_json(&reports)?, code })
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

pub fn read_root(path: &Path) -> CliResult<CorrelationRoot> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Core(Error::Io(format!("{}: {e}", path.display()))))?;
    let j: MatrixJson = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(CorrelationRoot::from_json(j)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyAStatus {
    /// No root given; the lower bound takes Property (A) for granted.
    Assumed,
    Holds,
    Fails,
    /// M = 1, where the lower bound needs no condition.
    NotRequired,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrelogOutput {
    #[serde(flatten)]
    pub report: PrelogReport,
    pub property_a: PropertyAStatus,
}

pub fn cmd_prelog(n: usize, q: usize, m: usize, matrix: Option<&Path>, rel_tol: f64) -> CliResult<PrelogOutput> {
    let status = match matrix {
        _ if m == 1 => PropertyAStatus::NotRequired,
        None => PropertyAStatus::Assumed,
        Some(path) => {
            let root = read_root(path)?;
            if (root.n(), root.q()) != (n, q) {
                return Err(CliError::Usage(format!(
                    "--matrix is {}x{} but --n {n} --q {q} was given",
                    root.n(),
                    root.q()
                )));
            }
            if check_property_a(&root, m, rel_tol)?.holds {
                PropertyAStatus::Holds
            } else {
                PropertyAStatus::Fails
            }
        }
    };
    let report = PrelogReport::new(n, q, m, status != PropertyAStatus::Fails)?;
    Ok(PrelogOutput { report, property_a: status })
}

pub fn cmd_antennas(n: usize, q: usize) -> CliResult<usize> {
    Ok(optimal_antennas(n, q)?)
}

pub fn cmd_check_pa(matrix: &Path, m: usize, rel_tol: f64) -> CliResult<PropertyAReport> {
    let root = read_root(matrix)?;
    Ok(check_property_a(&root, m, rel_tol)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub samples: usize,
    pub target_slope: f64,
    pub csv: String,
    #[serde(flatten)]
    pub curve: BoundCurve,
}

pub fn cmd_bound_sweep(a: &SweepArgs) -> CliResult<SweepSummary> {
    let curve = sweep_and_fit_with(
        a.input.into(),
        a.m,
        a.n,
        &a.rho_db,
        a.samples,
        RngStream::new(a.seed, 0),
        Execution::default(),
        a.jacobian_exponent_offset,
    )?;
    let file = File::create(&a.out).map_err(|e| Error::Io(format!("{}: {e}", a.out.display())))?;
    curve.write_csv(BufWriter::new(file))?;
    Ok(SweepSummary {
        seed: a.seed,
        samples: a.samples,
        target_slope: 1.0 - 1.0 / a.n as f64,
        csv: a.out.display().to_string(),
        curve,
    })
}

pub fn simulate_blocks(
    root: &CorrelationRoot,
    m: usize,
    rho: f64,
    input: InputKind,
    count: usize,
    stream: RngStream,
) -> CliResult<Vec<BlockSample>> {
    if m == 0 {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(CliError::Usage(format!("SNR must be positive, got {rho}")));
    }
    let n = root.n();
    let parts = map_chunks(count, DEFAULT_CHUNK, stream, Execution::default(), |chunk| {
        let mut rng = chunk.stream.rng();
        (0..chunk.len)
            .map(|_| {
                let x = sample_power_input(n, rho, input, &mut rng);
                simulate_block(root, &x, m, &mut rng)
            })
            .collect::<prelog_core::Result<Vec<_>>>()
    })?;
    Ok(parts.into_iter().flatten().collect())
}

pub fn cmd_simulate(a: &SimulateArgs) -> CliResult<Outcome> {
    let root = match &a.matrix {
        Some(p) => {
            let r = read_root(p)?;
            if (r.n(), r.q()) != (a.n, a.q) {
                return Err(CliError::Usage(format!("--matrix is {}x{} but --n {} --q {} was given", r.n(), r.q(), a.n, a.q)));
            }
            r
        }
        None if a.q == 1 && a.n >= 1 => CorrelationRoot::constant(a.n),
        None => {
            if a.q == 0 || a.q > a.n {
                return Err(CliError::Usage(format!("need 1 <= q <= n, got n={}, q={}", a.n, a.q)));
            }
            CorrelationRoot::random(a.n, a.q, &mut RngStream::new(a.seed, 1).rng())?
        }
    };
    let blocks = simulate_blocks(&root, a.m, db_to_linear(a.rho_db), a.input.into(), a.samples, RngStream::new(a.seed, 0))?;
    let mut text = String::new();
    for b in &blocks {
        text.push_str(&serde_json::to_string(b).map_err(Error::from)?);
        text.push('\n');
    }
    match &a.out {
        Some(path) => {
            let mut f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            f.write_all(text.as_bytes())?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text)),
    }
}

const VERIFY_PAIRS: usize = 2_000;
const VERIFY_SWEEP_DB: [f64; 3] = [40.0, 50.0, 60.0];
const VERIFY_SWEEP_SAMPLES: usize = 4_000;
const VERIFY_SLOPE_TOL: f64 = 0.05;
const VERIFY_ABS_TOL: f64 = 1e-9;

/// Runs every check with seeds derived from `seed`.
///
/// Sample counts below a check's floor are raised to the floor, so small
/// `samples` values still give a complete (and fast) run.
pub fn cmd_verify(seed: u64, samples: usize, jacobian_exponent_offset: i32) -> CliResult<Vec<CheckReport>> {
    let exec = Execution::default();
    let stream = |id: u64| RngStream::new(seed, id);
    let mut out = Vec::new();

    let mut rng = stream(0).rng();
    let mut weyl = Vec::with_capacity(VERIFY_PAIRS);
    let mut bounds = Vec::with_capacity(VERIFY_PAIRS);
    for k in 0..VERIFY_PAIRS {
        let (r, c) = (1 + k % 8, 1 + (k / 8) % 8);
        let a = sample_gaussian_matrix(r, c, &mut rng);
        let b = sample_gaussian_matrix(r, c, &mut rng);
        weyl.push(checks::weyl_check(&a, &b, VERIFY_ABS_TOL)?);
        let x = sample_power_input(c, db_to_linear(20.0), InputKind::Sphere, &mut rng);
        let s = sample_cn_vec(r, &mut rng);
        bounds.push(checks::sigma_bound_check(&x, &s, &b, VERIFY_ABS_TOL)?);
    }
    out.push(merge_reports("weyl", &weyl));
    out.push(merge_reports("sigma_bound", &bounds));

    let block = samples.max(checks::MIN_BLOCK_SAMPLES);
    out.push(checks::tail_energy_check(2, 3, 1e4, block, stream(1), exec)?);
    let logs: Vec<CheckReport> = [InputKind::Sphere, InputKind::Gaussian, InputKind::Zero]
        .into_iter()
        .enumerate()
        .map(|(i, kind)| checks::log_sigma1_check(2, 3, 1e4, kind, block, stream(2 + i as u64), exec))
        .collect::<prelog_core::Result<_>>()?;
    out.push(merge_reports("log_sigma1", &logs));

    let moments = samples.max(checks::MIN_MOMENT_SAMPLES);
    let root = CorrelationRoot::from_angles(&[0.0, 0.4, 0.8, 1.2])?;
    out.push(checks::noise_identity_check(&root, 2, moments, stream(5), exec)?);
    let x = sample_power_input(4, 2.0, InputKind::Sphere, &mut stream(6).rng());
    out.push(checks::data_processing_consistency(&root, 2, &x, moments, stream(7), exec)?);

    let curve = sweep_and_fit_with(
        InputKind::Sphere,
        2,
        3,
        &VERIFY_SWEEP_DB,
        samples.max(VERIFY_SWEEP_SAMPLES),
        stream(8),
        exec,
        jacobian_exponent_offset,
    )?;
    out.push(checks::sweep_caps_check(&curve));
    out.push(checks::sweep_slope_check(&curve, VERIFY_SLOPE_TOL));
    Ok(out)
}

/// Builds the global rayon pool, honoring the worker cap in the environment.
pub fn configure_threads(cap: Option<&str>) -> CliResult<()> {
    let Some(raw) = cap else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

