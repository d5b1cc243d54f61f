//! Three-block robust GPS for the TV-regularised Fourier problem.

use crate::error::{check_len, Result};
use crate::graph_projection::{check_relaxation, project_tv, relax, TvOperator};
use crate::model::{PriorSpec, ProblemInstance};
use crate::prox::{prox_amplitude, prox_l1, prox_prior};
use crate::CVec;

#[derive(Clone, Debug, PartialEq)]
pub struct GpsTvState {
    pub x: CVec,
    pub y1: CVec,
    pub y2: CVec,
    pub lambda: CVec,
    pub nu1: CVec,
    pub nu2: CVec,
}

impl GpsTvState {
    /// `(x0, A* x0, D x0)` with zero duals.
    pub fn from_signal(
        instance: &ProblemInstance,
        tv: Option<&TvOperator>,
        x0: CVec,
    ) -> Result<Self> {
        check_len(instance.n(), x0.len())?;
        let y1 = instance.ensemble.forward(&x0);
        let y2 = match tv {
            Some(d) => d.apply_checked(&x0)?,
            None => CVec::zeros(0),
        };
        Ok(Self {
            lambda: CVec::zeros(x0.len()),
            nu1: CVec::zeros(y1.len()),
            nu2: CVec::zeros(y2.len()),
            x: x0,
            y1,
            y2,
        })
    }

    pub fn distance(&self, other: &Self) -> f64 {
        [
            (&self.x, &other.x),
            (&self.y1, &other.y1),
            (&self.y2, &other.y2),
            (&self.lambda, &other.lambda),
            (&self.nu1, &other.nu1),
            (&self.nu2, &other.nu2),
        ]
        .iter()
        .map(|(a, b)| (*a - *b).norm_squared())
        .sum::<f64>()
        .sqrt()
    }
}

/// Parameters of a three-block step besides the state.
#[derive(Clone, Copy, Debug)]
pub struct TvStepParams {
    pub t: f64,
    pub tv_weight: f64,
    pub cg_tol: f64,
    pub cg_max: usize,
}

pub fn gps_tv_step(
    state: &GpsTvState,
    instance: &ProblemInstance,
    tv: Option<&TvOperator>,
    prior: &PriorSpec,
    params: &TvStepParams,
) -> Result<GpsTvState> {
    check_relaxation(params.t)?;
    let t = params.t;
    let c = &state.x - &state.lambda;
    let d1 = &state.y1 - &state.nu1;
    let d2 = &state.y2 - &state.nu2;
    let proj = project_tv(
        &instance.ensemble,
        tv,
        &c,
        &d1,
        &d2,
        params.cg_tol,
        params.cg_max,
    )?;
    let (xh, y1h, y2h) = if t == 0.0 {
        (proj.x, proj.y1, proj.y2)
    } else {
        (
            relax(t, &c, proj.x),
            relax(t, &d1, proj.y1),
            relax(t, &d2, proj.y2),
        )
    };
    let ux = xh + &state.lambda;
    let u1 = y1h + &state.nu1;
    let u2 = y2h + &state.nu2;
    let x = prox_prior(&ux, prior)?;
    let y1 = prox_amplitude(&u1, &instance.amplitudes)?;
    let y2 = prox_l1(&u2, params.tv_weight)?;
    Ok(GpsTvState {
        lambda: ux - &x,
        nu1: u1 - &y1,
        nu2: u2 - &y2,
        x,
        y1,
        y2,
    })
}
