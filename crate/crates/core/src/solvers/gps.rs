//! Graph projection splitting and its relaxed (robust) variant.

use crate::error::{check_len, Result};
use crate::graph_projection::GraphProjector;
use crate::model::rng::{gaussian_vector, rng_from_seed};
use crate::model::{PriorSpec, ProblemInstance};
use crate::prox::{prox_amplitude, prox_prior};
use crate::{CVec, RVec};

/// Primal pair `(x, y)` and dual pair `(lambda, nu)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GpsState {
    pub x: CVec,
    pub y: CVec,
    pub lambda: CVec,
    pub nu: CVec,
}

impl GpsState {
    /// `(x0, A* x0, 0, 0)`.
    pub fn from_signal(instance: &ProblemInstance, x0: CVec) -> Result<Self> {
        check_len(instance.n(), x0.len())?;
        let y = instance.ensemble.forward(&x0);
        Ok(Self {
            lambda: CVec::zeros(x0.len()),
            nu: CVec::zeros(y.len()),
            x: x0,
            y,
        })
    }

    /// Random Gaussian `x0` in the ensemble's field, zero duals.
    pub fn init(instance: &ProblemInstance, seed: u64) -> Self {
        let x0 = random_signal(instance, seed);
        Self::from_signal(instance, x0).expect("length matches by construction")
    }

    /// Stacked DR variable `(x + lambda, y + nu)`.
    pub fn dr_point(&self) -> (CVec, CVec) {
        (&self.x + &self.lambda, &self.y + &self.nu)
    }

    /// Largest entrywise change between two states.
    pub fn distance(&self, other: &Self) -> f64 {
        let sq = (&self.x - &other.x).norm_squared()
            + (&self.y - &other.y).norm_squared()
            + (&self.lambda - &other.lambda).norm_squared()
            + (&self.nu - &other.nu).norm_squared();
        sq.sqrt()
    }
}

pub fn random_signal(instance: &ProblemInstance, seed: u64) -> CVec {
    let mut rng = rng_from_seed(seed);
    gaussian_vector(&mut rng, instance.n(), instance.ensemble.field())
}

/// One GPS (`t = 0`) or RGPS (`0 < t < 1`) iteration.
pub fn gps_step(
    state: &GpsState,
    projector: &GraphProjector<'_>,
    b: &RVec,
    prior: &PriorSpec,
    t: f64,
) -> Result<GpsState> {
    let (xh, yh) =
        projector.project_relaxed(t, &(&state.x - &state.lambda), &(&state.y - &state.nu))?;
    let ux = xh + &state.lambda;
    let uy = yh + &state.nu;
    let x = prox_prior(&ux, prior)?;
    let y = prox_amplitude(&uy, b)?;
    // (lambda + x_half) - x_next, so an identity prox leaves lambda = 0 exactly
    let lambda = ux - &x;
    let nu = uy - &y;
    Ok(GpsState { x, y, lambda, nu })
}

/// [`gps_step`] with the relaxation required to be positive.
pub fn rgps_step(
    state: &GpsState,
    projector: &GraphProjector<'_>,
    b: &RVec,
    prior: &PriorSpec,
    t: f64,
) -> Result<GpsState> {
    if t <= 0.0 {
        return Err(crate::Error::InvalidParameter(format!(
            "rgps needs t > 0, got {t}"
        )));
    }
    gps_step(state, projector, b, prior, t)
}
