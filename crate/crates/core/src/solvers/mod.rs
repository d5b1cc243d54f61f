//! Iterative solvers and the shared run loop.

pub mod dr;
pub mod gps;
pub mod hio;
pub mod trace;
pub mod tv;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph_projection::{
    GraphProjector, RangeProjector, TvOperator, DEFAULT_CG_MAX_ITER, DEFAULT_CG_TOL,
};
use crate::model::{rel_err, residual, PriorSpec, ProblemInstance};
use crate::CVec;

pub use dr::{dr_step, rdr_step, recover_x, stacked_dr_step};
pub use gps::{gps_step, rgps_step, GpsState};
pub use hio::{hio_init, hio_step, run_hio, run_hio_from};
pub use trace::{Status, Trace, TraceRecord};
pub use tv::{gps_tv_step, GpsTvState, TvStepParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Gps,
    Rgps,
    Dr,
    Rdr,
    GpsTv,
    Hio,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Gps,
        Algorithm::Rgps,
        Algorithm::Dr,
        Algorithm::Rdr,
        Algorithm::GpsTv,
        Algorithm::Hio,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Gps => "gps",
            Algorithm::Rgps => "rgps",
            Algorithm::Dr => "dr",
            Algorithm::Rdr => "rdr",
            Algorithm::GpsTv => "gps_tv",
            Algorithm::Hio => "hio",
        }
    }

    /// Whether the algorithm uses the relaxation parameter `t`.
    pub fn is_relaxed(self) -> bool {
        matches!(self, Algorithm::Rgps | Algorithm::Rdr | Algorithm::GpsTv)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s || (s == "gps-tv" && *a == Algorithm::GpsTv))
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Phase-aligned error against the known truth.
    OracleRelErr,
    /// `| |A* x| - b | / |b|`; needs no truth.
    Residual,
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" | "oracle_rel_err" | "rel_err" => Ok(StopRule::OracleRelErr),
            "residual" => Ok(StopRule::Residual),
            other => Err(Error::Config(format!("unknown stop rule `{other}`"))),
        }
    }
}

pub const DEFAULT_T: f64 = 0.1;
pub const DEFAULT_MAX_ITERS: usize = 5000;
pub const DEFAULT_TOL: f64 = 1e-3;
pub const DEFAULT_TV_WEIGHT: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Relaxation; ignored (forced to 0) for `gps` and `dr`.
    pub t: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub stop_rule: StopRule,
    pub tv_weight: f64,
    pub hio_beta: f64,
    /// Seed of the random initial point.
    pub seed: u64,
    pub cg_tol: f64,
    pub cg_max: usize,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            t: DEFAULT_T,
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            stop_rule: StopRule::OracleRelErr,
            tv_weight: DEFAULT_TV_WEIGHT,
            hio_beta: 1.0,
            seed: 0,
            cg_tol: DEFAULT_CG_TOL,
            cg_max: DEFAULT_CG_MAX_ITER,
        }
    }

    /// The relaxation actually applied.
    pub fn effective_t(&self) -> f64 {
        if self.algorithm.is_relaxed() {
            self.t
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.effective_t();
        if !(0.0..1.0).contains(&t) {
            return Err(Error::Config(format!("t = {t} outside [0, 1)")));
        }
        if matches!(self.algorithm, Algorithm::Rgps | Algorithm::Rdr) && t <= 0.0 {
            return Err(Error::Config(format!("{} requires t > 0", self.algorithm)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!("tol = {}", self.tol)));
        }
        if !(self.tv_weight.is_finite() && self.tv_weight >= 0.0) {
            return Err(Error::Config(format!("tv_weight = {}", self.tv_weight)));
        }
        if !self.hio_beta.is_finite() {
            return Err(Error::Config(format!("hio_beta = {}", self.hio_beta)));
        }
        if !(self.cg_tol.is_finite() && self.cg_tol > 0.0) || self.cg_max == 0 {
            return Err(Error::Config(
                "cg tolerance and iteration cap must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Final iterate and its trace.
#[derive(Clone, Debug)]
pub struct Solution {
    pub x: CVec,
    pub trace: Trace,
}

impl Solution {
    pub fn iterations(&self) -> usize {
        self.trace.iterations()
    }

    pub fn converged(&self) -> bool {
        self.trace.converged()
    }
}

/// Run from the configured random initial point.
pub fn run(
    instance: &ProblemInstance,
    config: &SolverConfig,
    prior: &PriorSpec,
) -> Result<Solution> {
    run_from(instance, config, prior, None)
}

/// Run from `x0` when given, otherwise from the seeded random start.
///
/// Configuration problems are returned as errors. A numerical failure in the
/// middle of a run ends it with [`Status::Error`] and the last good iterate.
pub fn run_from(
    instance: &ProblemInstance,
    config: &SolverConfig,
    prior: &PriorSpec,
    x0: Option<CVec>,
) -> Result<Solution> {
    config.validate()?;
    prior.validate(instance.n())?;
    if let Some(x) = &x0 {
        check_len(instance.n(), x.len())?;
    }
    let truth = instance.truth.as_ref();
    if config.stop_rule == StopRule::OracleRelErr && truth.is_none() {
        return Err(Error::Config(
            "oracle stop rule needs a ground truth".into(),
        ));
    }
    if truth.is_some_and(|t| t.norm() == 0.0) && config.stop_rule == StopRule::OracleRelErr {
        return Err(Error::Config(
            "oracle stop rule needs a nonzero truth".into(),
        ));
    }
    let t = config.effective_t();
    let b = &instance.amplitudes;
    let ens = &instance.ensemble;

    let (mut x, mut stepper): (CVec, Box<dyn FnMut() -> Result<CVec> + '_>) = match config.algorithm
    {
        Algorithm::Gps | Algorithm::Rgps => {
            let projector = GraphProjector::build(ens)?;
            let mut state = match x0.clone() {
                Some(x) => GpsState::from_signal(instance, x)?,
                None => GpsState::init(instance, config.seed),
            };
            let x = state.x.clone();
            (
                x,
                Box::new(move || {
                    state = gps_step(&state, &projector, b, prior, t)?;
                    Ok(state.x.clone())
                }),
            )
        }
        Algorithm::Dr | Algorithm::Rdr => {
            if !prior.is_none() {
                return Err(Error::Config(format!(
                    "{} is only defined without a prior",
                    config.algorithm
                )));
            }
            let range = RangeProjector::build(ens)?;
            let start = x0
                .clone()
                .unwrap_or_else(|| gps::random_signal(instance, config.seed));
            let mut z = ens.forward(&start);
            (
                start,
                Box::new(move || {
                    z = dr_step(&z, &range, b, t)?;
                    recover_x(&z, &range, b)
                }),
            )
        }
        Algorithm::GpsTv => {
            let f = ens.fourier().ok_or_else(|| {
                Error::Config("gps_tv needs an oversampled Fourier ensemble".into())
            })?;
            let d = TvOperator::new(f.grid_height(), f.grid_width())?;
            let start = x0
                .clone()
                .unwrap_or_else(|| gps::random_signal(instance, config.seed));
            let mut state = GpsTvState::from_signal(instance, Some(&d), start)?;
            let params = TvStepParams {
                t,
                tv_weight: config.tv_weight,
                cg_tol: config.cg_tol,
                cg_max: config.cg_max,
            };
            let x = state.x.clone();
            (
                x,
                Box::new(move || {
                    state = gps_tv_step(&state, instance, Some(&d), prior, &params)?;
                    Ok(state.x.clone())
                }),
            )
        }
        Algorithm::Hio => {
            if ens.isometry_scale().is_none() {
                return Err(Error::Config("hio needs A A* = l I".into()));
            }
            let support: Vec<bool> = match (prior.support(), ens.fourier()) {
                (Some(s), _) => s.to_vec(),
                (None, Some(f)) => f.support_mask(),
                (None, None) => vec![true; instance.n()],
            };
            let mut cur = x0
                .clone()
                .unwrap_or_else(|| hio_init(instance.n(), &support, config.seed));
            let beta = config.hio_beta;
            (
                cur.clone(),
                Box::new(move || {
                    let s = hio_step(&cur, ens, b, &support, beta)?;
                    cur = s.x;
                    Ok(s.estimate)
                }),
            )
        }
    };

    let start = Instant::now();
    let metrics = |x: &CVec| -> Result<(Option<f64>, f64)> {
        let re = match truth {
            Some(t) if t.norm() > 0.0 => Some(rel_err(x, t)?),
            _ => None,
        };
        Ok((re, residual(ens, x, b)?))
    };
    let below_tol = |re: Option<f64>, res: f64| match config.stop_rule {
        StopRule::OracleRelErr => re.is_some_and(|e| e < config.tol),
        StopRule::Residual => res < config.tol,
    };

    let mut trace = Trace::new();
    let (re, res) = metrics(&x)?;
    trace.push(TraceRecord {
        iter: 0,
        rel_err: re,
        residual: res,
        seconds: 0.0,
    })?;

    let mut status = Status::MaxIters;
    for k in 1..=config.max_iters {
        match stepper() {
            Ok(next) => x = next,
            Err(e) => {
                status = Status::Error(e.to_string());
                break;
            }
        }
        let (re, res) = metrics(&x)?;
        trace.push(TraceRecord {
            iter: k,
            rel_err: re,
            residual: res,
            seconds: start.elapsed().as_secs_f64(),
        })?;
        if !(res.is_finite()) {
            status = Status::Error("non-finite iterate".into());
            break;
        }
        if below_tol(re, res) {
            status = Status::Converged;
            break;
        }
    }
    trace.finish(status)?;
    Ok(Solution { x, trace })
}
