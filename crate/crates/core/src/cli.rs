//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for configuration errors (bad flags, bad or
//! unreadable inputs), 2 for runtime and numerical failures.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diagnostics::{contraction_constants, ZeroPhase};
use crate::error::{Error, Result};
use crate::experiments::{
    self, emit, ExperimentGrid, Phantom, SparseConfig, SparseVariant, TableFormat, TableRow, TvConfig,
};
use crate::model::io::{load_matrix, load_vector, read_amplitudes_csv, save_vector};
use crate::model::{gen_gaussian, FieldKind, PriorSpec, ProblemInstance, SamplingEnsemble};
use crate::solvers::{self, Algorithm, SolverConfig, StopRule};

#[derive(Parser, Debug)]
#[command(name = "phasegraph", version, about = "Phase retrieval by graph projection splitting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one instance read from disk.
    Solve(SolveArgs),
    /// Success rate versus m/n on Gaussian instances.
    PhaseTransition(PhaseTransitionArgs),
    /// Median terminal error versus SNR on Gaussian instances.
    NoiseSweep(NoiseSweepArgs),
    /// GPS with l1 / l0 sparsity priors.
    Sparse(SparseArgs),
    /// HIO followed by RGPS-TV on Fourier phantoms.
    Tv(TvArgs),
    /// Local-convergence diagnostics of a random Gaussian instance.
    Spectral(SpectralArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Base seed of every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Result file; the format follows the extension (.jsonl/.json/.ndjson
    /// for JSON, otherwise CSV).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Suppress the human-readable summary.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl From<Field> for FieldKind {
    fn from(f: Field) -> Self {
        match f {
            Field::Real => FieldKind::Real,
            Field::Complex => FieldKind::Complex,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorKind {
    None,
    /// Support mask only.
    Support,
    /// Support, real-valued.
    Real,
    /// Support, real-valued and nonnegative.
    Nonneg,
    /// `max(Re x - p, 0)` on the support.
    Soft,
    /// Keep the `s` largest entries on the support.
    Hard,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Sampling matrix A (n x m, GPSMAT01).
    #[arg(long)]
    pub matrix: PathBuf,
    /// Amplitudes b (GPSVEC01, or `index,value` CSV when the name ends in .csv).
    #[arg(long)]
    pub amplitudes: PathBuf,
    /// Optional ground truth for the oracle stop rule and error reporting.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value = "rgps", value_parser = parse_algorithm)]
    pub algo: Algorithm,
    #[arg(long, default_value_t = solvers::DEFAULT_T)]
    pub t: f64,
    #[arg(long, default_value_t = solvers::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, default_value_t = solvers::DEFAULT_TOL)]
    pub tol: f64,
    /// `oracle` (needs --truth) or `residual`; default oracle when a truth is given.
    #[arg(long, value_parser = parse_stop_rule)]
    pub stop: Option<StopRule>,
    /// Field of the problem; default: complex if any input is complex.
    #[arg(long, value_enum)]
    pub field: Option<Field>,
    #[arg(long, value_enum, default_value_t = PriorKind::None)]
    pub prior: PriorKind,
    /// Support is the leading `support_len` coordinates (default: all).
    #[arg(long)]
    pub support_len: Option<usize>,
    /// Soft threshold.
    #[arg(long)]
    pub p: Option<f64>,
    /// Hard-threshold sparsity.
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub hio_beta: f64,
    /// Record wall-clock seconds in the trace (makes it non-reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct GaussianGridArgs {
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Ratios m/n as `a:step:b` or a comma list.
    #[arg(long, conflicts_with = "m")]
    pub ratios: Option<String>,
    /// Absolute measurement counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = Field::Real)]
    pub field: Field,
    #[arg(long, value_delimiter = ',', default_value = "gps,rgps", value_parser = parse_algorithm)]
    pub algos: Vec<Algorithm>,
    #[arg(long, default_value_t = solvers::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = solvers::DEFAULT_T)]
    pub t: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct PhaseTransitionArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GaussianGridArgs,
    #[arg(long, default_value_t = solvers::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct NoiseSweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GaussianGridArgs,
    /// SNR levels in dB (`inf` for noiseless).
    #[arg(long, value_delimiter = ',', default_value = "10,15,20,25,30,35,40,45,50")]
    pub snr: Vec<f64>,
    #[arg(long, default_value_t = experiments::NOISE_MAX_ITERS)]
    pub max_iters: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SparseArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Sparsity levels.
    #[arg(long, value_delimiter = ',', default_value = "5,10,15")]
    pub sparsity: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "l1,l0", value_parser = parse_variant)]
    pub variants: Vec<SparseVariant>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Soft threshold p = p_scale * s.
    #[arg(long, default_value_t = 1.0)]
    pub p_scale: f64,
    /// Lower bound of the nonzero magnitudes.
    #[arg(long, default_value_t = experiments::DEFAULT_MAGNITUDE_FLOOR)]
    pub floor: f64,
    #[arg(long, default_value_t = solvers::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, default_value_t = solvers::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct TvArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 16)]
    pub height: usize,
    #[arg(long, default_value_t = 16)]
    pub width: usize,
    #[arg(long, default_value_t = 2)]
    pub pad: usize,
    /// Rectangles per phantom; 0 gives a constant phantom.
    #[arg(long, default_value_t = 4)]
    pub blocks: usize,
    #[arg(long, value_delimiter = ',', default_value = "inf,30")]
    pub snr: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 1000)]
    pub hio_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 30)]
    pub steps: usize,
    #[arg(long, default_value_t = solvers::DEFAULT_T)]
    pub t: f64,
    /// Fixed TV weight (default: scaled with the noise level).
    #[arg(long)]
    pub tv_weight: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, conflicts_with = "ratio")]
    pub m: Option<usize>,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long, value_enum, default_value_t = Field::Complex)]
    pub field: Field,
    /// Relaxation to check against t_max.
    #[arg(long, default_value_t = solvers::DEFAULT_T)]
    pub t: f64,
    /// Use phase 1 where the reference or its measurements vanish.
    #[arg(long)]
    pub fill_zero_phase: bool,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_stop_rule(s: &str) -> std::result::Result<StopRule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_variant(s: &str) -> std::result::Result<SparseVariant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn snap(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

/// Inclusive arithmetic sequence from `"a:step:b"`, snapped to a 1e-12 grid.
pub fn parse_ratio_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("malformed range `{spec}` (expected a:step:b)"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (a, step, b) = (nums[0], nums[1], nums[2]);
    if !(a.is_finite() && step.is_finite() && b.is_finite()) {
        return Err(bad());
    }
    if step <= 0.0 {
        return Err(Error::Config(format!("range `{spec}`: step must be positive")));
    }
    if a > b {
        return Err(Error::Config(format!("range `{spec}` is empty")));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| snap(a + k as f64 * step)).collect())
}

/// Either a range `a:step:b` or a comma list.
pub fn parse_ratios(spec: &str) -> Result<Vec<f64>> {
    if spec.contains(':') {
        return parse_ratio_range(spec);
    }
    spec.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("malformed ratio `{p}`")))
        })
        .collect()
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. }
        | Error::MagicMismatch { .. }
        | Error::Truncated { .. }
        | Error::Format(_) => 1,
        _ => 2,
    }
}

/// Parse `args`, run, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Solve(a) => &a.common,
        Command::PhaseTransition(a) => &a.common,
        Command::NoiseSweep(a) => &a.common,
        Command::Sparse(a) => &a.common,
        Command::Tv(a) => &a.common,
        Command::Spectral(a) => &a.common,
    }
}

fn echo_config<T: Serialize>(name: &str, args: &T) -> Result<()> {
    println!("{name} {}", serde_json::to_string(args)?);
    Ok(())
}

pub fn execute(cmd: Command) -> Result<()> {
    let threads = common(&cmd).threads;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        if k == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match &cmd {
        Command::Solve(a) => solve(a),
        Command::PhaseTransition(a) => phase_transition(a),
        Command::NoiseSweep(a) => noise_sweep(a),
        Command::Sparse(a) => sparse(a),
        Command::Tv(a) => tv(a),
        Command::Spectral(a) => spectral(a),
    })
}

fn input_error(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Config(format!("cannot read {}: {io}", path.display())),
        other => other,
    }
}

fn write_rows<R: TableRow>(rows: &[R], c: &Common) -> Result<()> {
    if let Some(path) = &c.output {
        emit(rows, path, TableFormat::from_path(path))?;
    }
    if !c.quiet {
        crate::experiments::table::write_csv(std::io::stdout().lock(), rows)?;
    }
    Ok(())
}

fn grid_from(a: &GaussianGridArgs, c: &Common, max_iters: usize) -> Result<ExperimentGrid> {
    let ratios = match (&a.ratios, &a.m) {
        (Some(r), None) => parse_ratios(r)?,
        (None, Some(ms)) => {
            if a.n == 0 {
                return Err(Error::Config("n must be >= 1".into()));
            }
            ms.iter().map(|&m| m as f64 / a.n as f64).collect()
        }
        (None, None) => return Err(Error::Config("one of --ratios or --m is required".into())),
        (Some(_), Some(_)) => return Err(Error::Config("--ratios and --m are exclusive".into())),
    };
    let mut g = ExperimentGrid::new(a.n, ratios, a.field.into());
    g.trials = a.trials;
    g.algorithms = a.algos.clone();
    g.base_seed = c.seed;
    g.max_iters = max_iters;
    g.tol = a.tol;
    g.t = a.t;
    if !(a.tol.is_finite() && a.tol > 0.0) || !(0.0..1.0).contains(&a.t) {
        return Err(Error::Config("tol must be positive and t in [0, 1)".into()));
    }
    g.validate()?;
    Ok(g)
}

fn phase_transition(a: &PhaseTransitionArgs) -> Result<()> {
    echo_config("phase-transition", a)?;
    let g = grid_from(&a.grid, &a.common, a.max_iters)?;
    let rows = experiments::phase_transition(&g)?;
    write_rows(&rows, &a.common)
}

fn noise_sweep(a: &NoiseSweepArgs) -> Result<()> {
    echo_config("noise-sweep", a)?;
    let mut g = grid_from(&a.grid, &a.common, a.max_iters)?;
    g.snr_list = a.snr.clone();
    let rows = experiments::noise_sweep(&g)?;
    write_rows(&rows, &a.common)
}

fn sparse(a: &SparseArgs) -> Result<()> {
    echo_config("sparse", a)?;
    let mut c = SparseConfig::new(a.n, a.sparsity.clone());
    c.variants = a.variants.clone();
    c.trials = a.trials;
    c.base_seed = a.common.seed;
    c.max_iters = a.max_iters;
    c.tol = a.tol;
    c.p_scale = a.p_scale;
    c.magnitude_floor = a.floor;
    if !(a.tol.is_finite() && a.tol > 0.0) || !(a.floor.is_finite() && a.floor >= 0.0) {
        return Err(Error::Config("tol must be positive and floor nonnegative".into()));
    }
    let rows = experiments::sparse_experiment(&c)?;
    write_rows(&rows, &a.common)
}

fn tv(a: &TvArgs) -> Result<()> {
    echo_config("tv", a)?;
    if a.height == 0 || a.width == 0 || a.pad == 0 {
        return Err(Error::Config("height, width and pad must be >= 1".into()));
    }
    let mut c = TvConfig::new(a.height, a.width);
    c.pad_factor = a.pad;
    c.phantom = if a.blocks == 0 {
        Phantom::Constant
    } else {
        Phantom::PiecewiseConstant { blocks: a.blocks }
    };
    c.snr_list = a.snr.clone();
    c.trials = a.trials;
    c.base_seed = a.common.seed;
    c.hio_iters = a.hio_iters;
    c.hio_beta = a.beta;
    c.tv_steps = a.steps;
    c.t = a.t;
    c.tv_weight = a.tv_weight;
    let out = experiments::tv_experiment(&c)?;
    write_rows(&out.rows, &a.common)
}

fn spectral(a: &SpectralArgs) -> Result<()> {
    echo_config("spectral", a)?;
    if a.n == 0 {
        return Err(Error::Config("n must be >= 1".into()));
    }
    let m = match (a.m, a.ratio) {
        (Some(m), None) => m,
        (None, Some(r)) if r.is_finite() && r > 0.0 => experiments::measurements_for(a.n, r),
        (None, None) => 4 * a.n,
        _ => return Err(Error::Config("invalid --m / --ratio".into())),
    };
    if m == 0 {
        return Err(Error::Config("m must be >= 1".into()));
    }
    let inst = gen_gaussian(a.n, m, a.field.into(), a.common.seed)?;
    let truth = inst.truth.as_ref().expect("generated instances carry a truth");
    let policy = if a.fill_zero_phase {
        ZeroPhase::FillOne
    } else {
        ZeroPhase::Reject
    };
    let mut report = contraction_constants(&inst.ensemble, truth, policy)?;
    if a.t >= report.t_max {
        report.warnings.push(format!(
            "t = {} is not below t_max = {}; local contraction is not guaranteed",
            a.t, report.t_max
        ));
    }
    if let Some(path) = &a.common.output {
        let mut out = BufWriter::new(File::create(path)?);
        let pretty = path.extension().is_some_and(|e| e == "json");
        match TableFormat::from_path(path) {
            TableFormat::JsonLines if pretty => writeln!(out, "{}", report.to_json()?)?,
            TableFormat::JsonLines => writeln!(out, "{}", serde_json::to_string(&report)?)?,
            TableFormat::Csv => report.write_csv(&mut out)?,
        }
        out.flush()?;
    }
    if !a.common.quiet {
        println!("{}", report.to_json()?);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn solve(a: &SolveArgs) -> Result<()> {
    echo_config("solve", a)?;
    let out_path = a
        .common
        .output
        .as_ref()
        .ok_or_else(|| Error::Config("solve needs --output".into()))?;
    let (mat, mat_complex) = load_matrix(&a.matrix).map_err(|e| input_error(&a.matrix, e))?;
    let b = if a.amplitudes.extension().is_some_and(|e| e == "csv") {
        File::open(&a.amplitudes)
            .map_err(Error::from)
            .and_then(read_amplitudes_csv)
            .map_err(|e| input_error(&a.amplitudes, e))?
    } else {
        let (v, complex) = load_vector(&a.amplitudes).map_err(|e| input_error(&a.amplitudes, e))?;
        if complex || v.iter().any(|z| z.re < 0.0) {
            return Err(Error::Config("amplitudes must be real and nonnegative".into()));
        }
        v.map(|z| z.re)
    };
    let truth = match &a.truth {
        Some(p) => Some(load_vector(p).map_err(|e| input_error(p, e))?),
        None => None,
    };
    let any_complex = mat_complex || truth.as_ref().is_some_and(|t| t.1);
    let field = match a.field {
        Some(f) => f.into(),
        None if any_complex => FieldKind::Complex,
        None => FieldKind::Real,
    };
    let ensemble = SamplingEnsemble::dense(mat, field)?;
    let n = ensemble.n();
    let instance = ProblemInstance::new(ensemble, truth.map(|t| t.0), b, a.common.seed)?;

    let support_len = a.support_len.unwrap_or(n);
    if support_len > n {
        return Err(Error::Config(format!("support_len {support_len} > n = {n}")));
    }
    let support = crate::model::leading_support(n, support_len);
    let prior = match a.prior {
        PriorKind::None => PriorSpec::None,
        PriorKind::Support => PriorSpec::Indicator { support, real_valued: false, nonnegative: false },
        PriorKind::Real => PriorSpec::Indicator { support, real_valued: true, nonnegative: false },
        PriorKind::Nonneg => PriorSpec::Indicator { support, real_valued: true, nonnegative: true },
        PriorKind::Soft => PriorSpec::SoftThreshold {
            p: a.p.ok_or_else(|| Error::Config("--prior soft needs --p".into()))?,
            support,
        },
        PriorKind::Hard => PriorSpec::HardThreshold {
            s: a.s.ok_or_else(|| Error::Config("--prior hard needs --s".into()))?,
            support,
        },
    };
    let mut config = SolverConfig::new(a.algo);
    config.t = a.t;
    config.max_iters = a.max_iters;
    config.tol = a.tol;
    config.seed = a.common.seed;
    config.hio_beta = a.hio_beta;
    config.stop_rule = a.stop.unwrap_or(if instance.truth.is_some() {
        StopRule::OracleRelErr
    } else {
        StopRule::Residual
    });
    let sol = solvers::run(&instance, &config, &prior)?;
    save_vector(out_path, &sol.x)?;
    let trace_path = trace_path_for(out_path);
    let mut out = BufWriter::new(File::create(&trace_path)?);
    sol.trace.write_csv(&mut out, a.timings)?;
    out.flush()?;
    if !a.common.quiet {
        let last = sol.trace.last();
        println!(
            "{}: {} iterations, status {:?}, residual {:e}{}",
            a.algo,
            sol.iterations(),
            sol.trace.status(),
            last.map_or(f64::NAN, |r| r.residual),
            match sol.trace.final_rel_err() {
                Some(e) => format!(", rel_err {e:e}"),
                None => String::new(),
            }
        );
        println!("wrote {} and {}", out_path.display(), trace_path.display());
    }
    if let Some(solvers::Status::Error(e)) = sol.trace.status() {
        return Err(Error::Degenerate(format!("run stopped early: {e}")));
    }
    Ok(())
}

/// `x.gpsvec` -> `x.trace.csv` next to it.
pub fn trace_path_for(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "solution".into());
    output.with_file_name(format!("{stem}.trace.csv"))
}
