//! Douglas-Rachford iterations: the single-variable measurement-space form
//! (`g = 0`, `m >= n`) and the stacked form on `(x, y)` that generates the
//! GPS sequence.

use crate::error::{check_len, Result};
use crate::graph_projection::{GraphProjector, RangeProjector};
use crate::model::PriorSpec;
use crate::prox::{prox_amplitude, prox_prior};
use crate::{CVec, RVec};

/// `z + R_t(2p - z) - p` with `p = prox_amplitude(z, b)` and
/// `R_t = t I + (1 - t) A*(AA*)^{-1}A`. `t = 0` is plain DR.
pub fn dr_step(z: &CVec, range: &RangeProjector<'_>, b: &RVec, t: f64) -> Result<CVec> {
    let p = prox_amplitude(z, b)?;
    let reflected = &p * crate::Complex64::from(2.0) - z;
    let r = range.project_relaxed(t, &reflected)?;
    Ok(z + r - p)
}

/// Relaxed DR; identical to [`dr_step`] but insists on `t > 0`.
pub fn rdr_step(z: &CVec, range: &RangeProjector<'_>, b: &RVec, t: f64) -> Result<CVec> {
    if t <= 0.0 {
        return Err(crate::Error::InvalidParameter(format!(
            "rdr needs t > 0, got {t}"
        )));
    }
    dr_step(z, range, b, t)
}

/// Signal estimate `(AA*)^{-1} A prox_amplitude(z, b)`.
pub fn recover_x(z: &CVec, range: &RangeProjector<'_>, b: &RVec) -> Result<CVec> {
    range.recover(&prox_amplitude(z, b)?)
}

/// `prox_phi(x, y) = (prox_g(x), prox_f(y))`.
pub fn prox_phi(x: &CVec, y: &CVec, b: &RVec, prior: &PriorSpec) -> Result<(CVec, CVec)> {
    Ok((prox_prior(x, prior)?, prox_amplitude(y, b)?))
}

/// One step of the stacked iteration
/// `z <- z + M_t(2 prox_phi(z) - z) - prox_phi(z)` where `M_t` is the
/// (relaxed) graph projection. Returns the new `z`.
pub fn stacked_dr_step(
    z: &(CVec, CVec),
    projector: &GraphProjector<'_>,
    b: &RVec,
    prior: &PriorSpec,
    t: f64,
) -> Result<(CVec, CVec)> {
    let (zx, zy) = z;
    let (px, py) = prox_phi(zx, zy, b, prior)?;
    let two = crate::Complex64::from(2.0);
    let (mx, my) = projector.project_relaxed(t, &(&px * two - zx), &(&py * two - zy))?;
    Ok((zx + mx - px, zy + my - py))
}

/// `|M_t(2 prox_phi(z) - z) - prox_phi(z)|`, the distance of `z` from being
/// a fixed point of the stacked iteration.
pub fn stacked_fixed_point_residual(
    z: &(CVec, CVec),
    projector: &GraphProjector<'_>,
    b: &RVec,
    prior: &PriorSpec,
    t: f64,
) -> Result<f64> {
    let (zx, zy) = z;
    check_len(projector.ensemble().n(), zx.len())?;
    let (nx, ny) = stacked_dr_step(z, projector, b, prior, t)?;
    Ok(((nx - zx).norm_squared() + (ny - zy).norm_squared()).sqrt())
}
