//! Monte-Carlo harnesses: Gaussian phase transitions, noise sweeps, sparse
//! recovery and TV refinement of HIO on Fourier phantoms.
//!
//! Trials run in parallel on the ambient rayon pool. Every trial draws its
//! seeds from `(base_seed, cell, trial)` only, and results are collected in
//! task order, so output does not depend on the thread count.

pub mod align;
pub mod table;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::rng::derive_seed;
use crate::model::{
    add_noise, embed_image, gen_gaussian, gen_sparse, leading_support, piecewise_constant_phantom, FieldKind,
    PriorSpec, ProblemInstance, SamplingEnsemble,
};
use crate::solvers::{run, run_from, run_hio, Algorithm, SolverConfig, StopRule};

pub use align::aligned_rel_err;
pub use table::{emit, read_table, TableFormat, TableRow};

const TAG_GAUSSIAN: u64 = 1;
const TAG_INIT: u64 = 2;
const TAG_NOISE: u64 = 3;
const TAG_SPARSE: u64 = 4;
const TAG_PHANTOM: u64 = 5;
const TAG_HIO: u64 = 6;

/// Success threshold on the terminal relative error.
pub const SUCCESS_TOL: f64 = 1e-3;
/// Iteration cap of the noisy runs.
pub const NOISE_MAX_ITERS: usize = 200;

fn field_code(field: FieldKind) -> u64 {
    match field {
        FieldKind::Real => 0,
        FieldKind::Complex => 1,
    }
}

/// `round(ratio * n)`, at least 1.
pub fn measurements_for(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64).round() as usize).max(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentGrid {
    pub n: usize,
    pub m_ratios: Vec<f64>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub field: FieldKind,
    pub snr_list: Vec<f64>,
    pub base_seed: u64,
    pub max_iters: usize,
    pub tol: f64,
    pub t: f64,
}

impl ExperimentGrid {
    pub fn new(n: usize, m_ratios: Vec<f64>, field: FieldKind) -> Self {
        Self {
            n,
            m_ratios,
            trials: 10,
            algorithms: vec![Algorithm::Gps, Algorithm::Rgps],
            field,
            snr_list: Vec::new(),
            base_seed: 0,
            max_iters: crate::solvers::DEFAULT_MAX_ITERS,
            tol: SUCCESS_TOL,
            t: crate::solvers::DEFAULT_T,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.m_ratios.is_empty() || self.m_ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Config("measurement ratios must be positive".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms selected".into()));
        }
        if let Some(a) = self.algorithms.iter().find(|a| matches!(a, Algorithm::GpsTv | Algorithm::Hio)) {
            return Err(Error::Config(format!("{a} is not available for Gaussian ensembles")));
        }
        Ok(())
    }

    fn solver_config(&self, algorithm: Algorithm, seed: u64, max_iters: usize) -> SolverConfig {
        let mut c = SolverConfig::new(algorithm);
        c.t = self.t;
        c.tol = self.tol;
        c.max_iters = max_iters;
        c.seed = seed;
        c.stop_rule = StopRule::OracleRelErr;
        c
    }
}

/// Outcome of one run inside an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub success: bool,
    pub iterations: usize,
    /// Terminal relative error (`inf` when the run could not start).
    pub rel_err: f64,
    pub failure: Option<String>,
}

impl TrialResult {
    fn failed(reason: String, max_iters: usize) -> Self {
        Self {
            success: false,
            iterations: max_iters,
            rel_err: f64::INFINITY,
            failure: Some(reason),
        }
    }
}

/// Seeds of the `(field, n, m, trial)` instance and its random start; shared by
/// all algorithms so comparisons are paired.
pub fn gaussian_seeds(base: u64, field: FieldKind, n: usize, m: usize, trial: usize) -> (u64, u64) {
    let key = [field_code(field), n as u64, m as u64, trial as u64];
    let inst = derive_seed(base, &[&[TAG_GAUSSIAN][..], &key].concat());
    let init = derive_seed(base, &[&[TAG_INIT][..], &key].concat());
    (inst, init)
}

fn noise_seed(base: u64, field: FieldKind, n: usize, m: usize, snr: f64, trial: usize) -> u64 {
    derive_seed(
        base,
        &[TAG_NOISE, field_code(field), n as u64, m as u64, snr.to_bits(), trial as u64],
    )
}

fn solve_trial(
    instance: Result<ProblemInstance>,
    config: &SolverConfig,
    prior: &PriorSpec,
    success_tol: f64,
) -> TrialResult {
    let outcome = instance.and_then(|inst| run(&inst, config, prior));
    match outcome {
        Ok(sol) => {
            let rel_err = sol.trace.final_rel_err().unwrap_or(f64::INFINITY);
            let failure = match sol.trace.status() {
                Some(crate::solvers::Status::Error(e)) => Some(e.clone()),
                _ => None,
            };
            TrialResult {
                success: rel_err < success_tol,
                iterations: sol.iterations(),
                rel_err,
                failure,
            }
        }
        Err(e) => TrialResult::failed(e.to_string(), config.max_iters),
    }
}

/// One clean Gaussian trial.
pub fn gaussian_trial(grid: &ExperimentGrid, algorithm: Algorithm, m: usize, trial: usize) -> TrialResult {
    let (inst_seed, init_seed) = gaussian_seeds(grid.base_seed, grid.field, grid.n, m, trial);
    let cfg = grid.solver_config(algorithm, init_seed, grid.max_iters);
    solve_trial(gen_gaussian(grid.n, m, grid.field, inst_seed), &cfg, &PriorSpec::None, grid.tol)
}

/// One noisy Gaussian trial (the instance is the clean one of the same
/// `(field, n, m, trial)` cell plus noise).
pub fn noisy_trial(grid: &ExperimentGrid, algorithm: Algorithm, m: usize, snr_db: f64, trial: usize) -> TrialResult {
    let (inst_seed, init_seed) = gaussian_seeds(grid.base_seed, grid.field, grid.n, m, trial);
    let cfg = grid.solver_config(algorithm, init_seed, grid.max_iters);
    let nseed = noise_seed(grid.base_seed, grid.field, grid.n, m, snr_db, trial);
    let inst = gen_gaussian(grid.n, m, grid.field, inst_seed).and_then(|i| add_noise(i, snr_db, nseed));
    solve_trial(inst, &cfg, &PriorSpec::None, grid.tol)
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Median (mean of the middle pair for even length); NaN when empty.
pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let k = s.len();
    if k % 2 == 1 {
        s[k / 2]
    } else {
        0.5 * (s[k / 2 - 1] + s[k / 2])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTransitionRow {
    pub field: FieldKind,
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub ratio: f64,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_iters: f64,
    pub median_iters: f64,
}

impl TableRow for PhaseTransitionRow {
    const HEADER: &'static [&'static str] = &[
        "field",
        "algorithm",
        "n",
        "m",
        "ratio",
        "trials",
        "success_rate",
        "mean_iters",
        "median_iters",
    ];
}

/// Success rate and iteration statistics for every `(ratio, algorithm)`
/// cell; rows ordered by ratio, then algorithm as listed in the grid.
pub fn phase_transition(grid: &ExperimentGrid) -> Result<Vec<PhaseTransitionRow>> {
    grid.validate()?;
    let cells: Vec<(f64, Algorithm)> = grid
        .m_ratios
        .iter()
        .flat_map(|&r| grid.algorithms.iter().map(move |&a| (r, a)))
        .collect();
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..grid.trials).map(move |t| (c, t)))
        .collect();
    let results: Vec<TrialResult> = tasks
        .par_iter()
        .map(|&(c, t)| {
            let (ratio, alg) = cells[c];
            gaussian_trial(grid, alg, measurements_for(grid.n, ratio), t)
        })
        .collect();
    Ok(cells
        .iter()
        .enumerate()
        .map(|(c, &(ratio, algorithm))| {
            let chunk = &results[c * grid.trials..(c + 1) * grid.trials];
            let iters: Vec<f64> = chunk.iter().map(|r| r.iterations as f64).collect();
            PhaseTransitionRow {
                field: grid.field,
                algorithm,
                n: grid.n,
                m: measurements_for(grid.n, ratio),
                ratio,
                trials: grid.trials,
                success_rate: chunk.iter().filter(|r| r.success).count() as f64 / grid.trials as f64,
                mean_iters: mean(&iters),
                median_iters: median(&iters),
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseRow {
    pub field: FieldKind,
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    #[serde(with = "table::extended_f64")]
    pub snr_db: f64,
    #[serde(with = "table::extended_f64")]
    pub median_rel_err_db: f64,
}

impl TableRow for NoiseRow {
    const HEADER: &'static [&'static str] = &["field", "algorithm", "n", "m", "snr_db", "median_rel_err_db"];
}

/// Per-trial terminal errors of a noise sweep, indexed
/// `[ratio][snr][algorithm][trial]`.
pub type NoiseTrials = Vec<Vec<Vec<Vec<TrialResult>>>>;

pub fn noise_sweep_trials(grid: &ExperimentGrid) -> Result<NoiseTrials> {
    grid.validate()?;
    if grid.snr_list.is_empty() {
        return Err(Error::Config("noise sweep needs at least one SNR".into()));
    }
    if grid.snr_list.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
        return Err(Error::Config("SNR values must be finite or +inf".into()));
    }
    let (nr, ns, na, nt) = (grid.m_ratios.len(), grid.snr_list.len(), grid.algorithms.len(), grid.trials);
    let flat: Vec<TrialResult> = (0..nr * ns * na * nt)
        .into_par_iter()
        .map(|k| {
            let t = k % nt;
            let a = (k / nt) % na;
            let s = (k / (nt * na)) % ns;
            let r = k / (nt * na * ns);
            let m = measurements_for(grid.n, grid.m_ratios[r]);
            noisy_trial(grid, grid.algorithms[a], m, grid.snr_list[s], t)
        })
        .collect();
    let mut it = flat.into_iter();
    Ok((0..nr)
        .map(|_| {
            (0..ns)
                .map(|_| (0..na).map(|_| it.by_ref().take(nt).collect()).collect())
                .collect()
        })
        .collect())
}

/// Median terminal error in dB (`20 log10`) per `(ratio, snr, algorithm)`.
/// Runs use `grid.max_iters` (set it to [`NOISE_MAX_ITERS`] to follow the
/// reference protocol).
pub fn noise_sweep(grid: &ExperimentGrid) -> Result<Vec<NoiseRow>> {
    let trials = noise_sweep_trials(grid)?;
    let mut rows = Vec::new();
    for (r, per_ratio) in trials.iter().enumerate() {
        let m = measurements_for(grid.n, grid.m_ratios[r]);
        for (s, per_snr) in per_ratio.iter().enumerate() {
            for (a, per_alg) in per_snr.iter().enumerate() {
                let errs: Vec<f64> = per_alg.iter().map(|t| t.rel_err).collect();
                rows.push(NoiseRow {
                    field: grid.field,
                    algorithm: grid.algorithms[a],
                    n: grid.n,
                    m,
                    snr_db: grid.snr_list[s],
                    median_rel_err_db: 20.0 * median(&errs).log10(),
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SparseVariant {
    L1,
    L0,
}

impl SparseVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            SparseVariant::L1 => "l1",
            SparseVariant::L0 => "l0",
        }
    }
}

impl std::str::FromStr for SparseVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(SparseVariant::L1),
            "l0" => Ok(SparseVariant::L0),
            other => Err(Error::Config(format!("unknown sparse variant `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseConfig {
    pub n: usize,
    pub sparsities: Vec<usize>,
    pub variants: Vec<SparseVariant>,
    pub trials: usize,
    pub base_seed: u64,
    pub max_iters: usize,
    pub tol: f64,
    /// Soft threshold `p = p_scale * s`.
    pub p_scale: f64,
    /// Lower bound added to the nonzero magnitudes of the truth.
    pub magnitude_floor: f64,
}

impl SparseConfig {
    pub fn new(n: usize, sparsities: Vec<usize>) -> Self {
        Self {
            n,
            sparsities,
            variants: vec![SparseVariant::L1, SparseVariant::L0],
            trials: 10,
            base_seed: 0,
            max_iters: crate::solvers::DEFAULT_MAX_ITERS,
            tol: SUCCESS_TOL,
            p_scale: 1.0,
            magnitude_floor: DEFAULT_MAGNITUDE_FLOOR,
        }
    }

    /// Length of the known support `[0, floor(n/2))`.
    pub fn support_len(&self) -> usize {
        self.n / 2
    }
}

/// Default lower bound on the nonzero entries of sparse test signals.
pub const DEFAULT_MAGNITUDE_FLOOR: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseRow {
    pub variant: SparseVariant,
    pub n: usize,
    pub s: usize,
    /// Soft threshold for `l1`; the kept count `s` for `l0`.
    pub p: f64,
    pub rate: f64,
    pub mean_iters: f64,
}

impl TableRow for SparseRow {
    const HEADER: &'static [&'static str] = &["variant", "n", "s", "p", "rate", "mean_iters"];
}

fn sparse_prior(variant: SparseVariant, s: usize, p: f64, support: Vec<bool>) -> PriorSpec {
    match variant {
        SparseVariant::L1 => PriorSpec::SoftThreshold { p, support },
        SparseVariant::L0 => PriorSpec::HardThreshold { s, support },
    }
}

/// GPS with a thresholding prior on real Gaussian data with `m = n`.
pub fn sparse_experiment(cfg: &SparseConfig) -> Result<Vec<SparseRow>> {
    if cfg.n < 2 || cfg.trials == 0 || cfg.variants.is_empty() {
        return Err(Error::Config("sparse experiment needs n >= 2, trials >= 1 and a variant".into()));
    }
    let support_len = cfg.support_len();
    if let Some(s) = cfg.sparsities.iter().find(|&&s| s > support_len) {
        return Err(Error::Config(format!("sparsity {s} exceeds support size {support_len}")));
    }
    if !(cfg.p_scale.is_finite() && cfg.p_scale > 0.0) {
        return Err(Error::Config(format!("p_scale = {}", cfg.p_scale)));
    }
    let cells: Vec<(usize, SparseVariant)> = cfg
        .sparsities
        .iter()
        .flat_map(|&s| cfg.variants.iter().map(move |&v| (s, v)))
        .collect();
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let results: Vec<TrialResult> = tasks
        .par_iter()
        .map(|&(c, trial)| {
            let (s, variant) = cells[c];
            if s == 0 {
                // empty support: the zero signal is recovered trivially
                return TrialResult { success: true, iterations: 0, rel_err: 0.0, failure: None };
            }
            let key = [TAG_SPARSE, cfg.n as u64, s as u64, trial as u64];
            let inst_seed = derive_seed(cfg.base_seed, &key);
            let init_seed = derive_seed(cfg.base_seed, &[TAG_INIT, cfg.n as u64, s as u64, trial as u64]);
            let p = cfg.p_scale * s as f64;
            let prior = sparse_prior(variant, s, p, leading_support(cfg.n, support_len));
            let mut sc = SolverConfig::new(Algorithm::Gps);
            sc.max_iters = cfg.max_iters;
            sc.tol = cfg.tol;
            sc.seed = init_seed;
            let inst = gen_sparse(cfg.n, cfg.n, s, support_len, cfg.magnitude_floor, inst_seed);
            solve_trial(inst, &sc, &prior, cfg.tol)
        })
        .collect();
    Ok(cells
        .iter()
        .enumerate()
        .map(|(c, &(s, variant))| {
            let chunk = &results[c * cfg.trials..(c + 1) * cfg.trials];
            let iters: Vec<f64> = chunk.iter().map(|r| r.iterations as f64).collect();
            SparseRow {
                variant,
                n: cfg.n,
                s,
                p: match variant {
                    SparseVariant::L1 => cfg.p_scale * s as f64,
                    SparseVariant::L0 => s as f64,
                },
                rate: chunk.iter().filter(|r| r.success).count() as f64 / cfg.trials as f64,
                mean_iters: mean(&iters),
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phantom {
    /// Random axis-aligned rectangles with values in `[0.2, 1)`.
    PiecewiseConstant { blocks: usize },
    /// Constant image of value 1.
    Constant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TvConfig {
    pub h: usize,
    pub w: usize,
    pub pad_factor: usize,
    pub phantom: Phantom,
    pub snr_list: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub hio_iters: usize,
    pub hio_beta: f64,
    pub tv_steps: usize,
    pub t: f64,
    /// Fixed TV weight; `None` scales it with the noise level
    /// (see [`noise_scaled_tv_weight`]).
    pub tv_weight: Option<f64>,
}

/// TV weight per unit relative noise `10^(-snr/20)`.
pub const TV_WEIGHT_PER_NOISE: f64 = 0.3;

/// `TV_WEIGHT_PER_NOISE * 10^(-snr_db/20)`; zero for noiseless data.
pub fn noise_scaled_tv_weight(snr_db: f64) -> f64 {
    TV_WEIGHT_PER_NOISE * 10f64.powf(-snr_db / 20.0)
}

impl TvConfig {
    pub fn new(h: usize, w: usize) -> Self {
        Self {
            h,
            w,
            pad_factor: 2,
            phantom: Phantom::PiecewiseConstant { blocks: 4 },
            snr_list: vec![f64::INFINITY],
            trials: 10,
            base_seed: 0,
            hio_iters: 1000,
            hio_beta: 1.0,
            tv_steps: 30,
            t: crate::solvers::DEFAULT_T,
            tv_weight: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvRow {
    pub h: usize,
    pub w: usize,
    #[serde(with = "table::extended_f64")]
    pub snr_db: f64,
    #[serde(with = "table::extended_f64")]
    pub err_hio: f64,
    #[serde(with = "table::extended_f64")]
    pub err_hio_rgps: f64,
}

impl TableRow for TvRow {
    const HEADER: &'static [&'static str] = &["h", "w", "snr_db", "err_hio", "err_hio_rgps"];
}

#[derive(Clone, Debug, PartialEq)]
pub struct TvTrial {
    pub snr_db: f64,
    pub trial: usize,
    pub err_hio: f64,
    pub err_hio_rgps: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TvOutcome {
    /// Mean aligned errors per SNR.
    pub rows: Vec<TvRow>,
    pub trials: Vec<TvTrial>,
}

fn phantom_image(cfg: &TvConfig, trial: usize) -> Vec<f64> {
    match cfg.phantom {
        Phantom::Constant => vec![1.0; cfg.h * cfg.w],
        Phantom::PiecewiseConstant { blocks } => {
            let seed = derive_seed(cfg.base_seed, &[TAG_PHANTOM, cfg.h as u64, cfg.w as u64, trial as u64]);
            piecewise_constant_phantom(cfg.h, cfg.w, blocks, seed)
        }
    }
}

/// HIO followed by a short three-block RGPS-TV refinement on an oversampled
/// Fourier phantom. Errors are aligned over shifts and reflections.
///
/// The Fourier map is scaled to be unitary (`A A* = I`).
pub fn tv_experiment(cfg: &TvConfig) -> Result<TvOutcome> {
    if cfg.trials == 0 || cfg.snr_list.is_empty() {
        return Err(Error::Config("tv experiment needs trials and an SNR list".into()));
    }
    if cfg.snr_list.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
        return Err(Error::Config("SNR values must be finite or +inf".into()));
    }
    let grid_len = cfg
        .h
        .checked_mul(cfg.w)
        .and_then(|k| k.checked_mul(cfg.pad_factor * cfg.pad_factor))
        .ok_or_else(|| Error::Config("grid too large".into()))?;
    let scale = 1.0 / (grid_len as f64).sqrt();
    let ensemble = SamplingEnsemble::scaled_fourier(cfg.h, cfg.w, cfg.pad_factor, scale)?;
    let fourier = ensemble.fourier().expect("fourier ensemble").clone();
    let (gh, gw) = (fourier.grid_height(), fourier.grid_width());
    let support = fourier.support_mask();
    let prior = PriorSpec::Indicator {
        support: support.clone(),
        real_valued: true,
        nonnegative: true,
    };
    let solver_config = |snr: f64| {
        let mut sc = SolverConfig::new(Algorithm::GpsTv);
        sc.t = cfg.t;
        sc.tv_weight = cfg.tv_weight.unwrap_or_else(|| noise_scaled_tv_weight(snr));
        sc.max_iters = cfg.tv_steps;
        // fixed number of refinement steps
        sc.stop_rule = StopRule::Residual;
        sc.tol = f64::MIN_POSITIVE;
        sc
    };
    for &snr in &cfg.snr_list {
        solver_config(snr).validate()?;
    }

    let tasks: Vec<(usize, usize)> = (0..cfg.snr_list.len())
        .flat_map(|s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    let trials: Vec<Result<TvTrial>> = tasks
        .par_iter()
        .map(|&(si, trial)| {
            let snr = cfg.snr_list[si];
            let img = phantom_image(cfg, trial);
            let truth = embed_image(&img, cfg.h, cfg.w, &fourier)?;
            let clean = ProblemInstance::from_truth(ensemble.clone(), truth.clone(), cfg.base_seed)?;
            let nseed = derive_seed(cfg.base_seed, &[TAG_NOISE, gh as u64, gw as u64, snr.to_bits(), trial as u64]);
            let inst = add_noise(clean, snr, nseed)?;
            let hio_seed = derive_seed(cfg.base_seed, &[TAG_HIO, gh as u64, gw as u64, trial as u64]);
            let x_hio = run_hio(&inst.ensemble, &inst.amplitudes, &support, cfg.hio_beta, cfg.hio_iters, hio_seed)?;
            let refined = run_from(&inst, &solver_config(snr), &prior, Some(x_hio.clone()))?;
            if let Some(crate::solvers::Status::Error(e)) = refined.trace.status() {
                return Err(Error::Degenerate(format!("refinement failed: {e}")));
            }
            Ok(TvTrial {
                snr_db: snr,
                trial,
                err_hio: aligned_rel_err(&x_hio, &truth, gh, gw)?,
                err_hio_rgps: aligned_rel_err(&refined.x, &truth, gh, gw)?,
            })
        })
        .collect();
    let trials: Vec<TvTrial> = trials.into_iter().collect::<Result<_>>()?;
    let rows = cfg
        .snr_list
        .iter()
        .enumerate()
        .map(|(si, &snr)| {
            let chunk = &trials[si * cfg.trials..(si + 1) * cfg.trials];
            TvRow {
                h: cfg.h,
                w: cfg.w,
                snr_db: snr,
                err_hio: mean(&chunk.iter().map(|t| t.err_hio).collect::<Vec<_>>()),
                err_hio_rgps: mean(&chunk.iter().map(|t| t.err_hio_rgps).collect::<Vec<_>>()),
            }
        })
        .collect();
    Ok(TvOutcome { rows, trials })
}
