//! Proximal maps of the amplitude constraint and the signal priors.

use crate::error::{check_len, Error, Result};
use crate::model::PriorSpec;
use crate::{CVec, Complex64, RVec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Projection onto `{y : |y_i| = b_i}`: `b_i z_i / |z_i|`, with `0` where
/// `z_i = 0`.
pub fn prox_amplitude(z: &CVec, b: &RVec) -> Result<CVec> {
    check_len(b.len(), z.len())?;
    Ok(CVec::from_fn(z.len(), |i, _| amplitude_entry(z[i], b[i])))
}

#[inline]
fn amplitude_entry(z: Complex64, b: f64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        ZERO
    } else {
        z * (b / r)
    }
}

/// Proximal map of the prior `g` (with unit step).
pub fn prox_prior(x: &CVec, spec: &PriorSpec) -> Result<CVec> {
    spec.validate(x.len())?;
    Ok(match spec {
        PriorSpec::None => x.clone(),
        PriorSpec::Indicator {
            support,
            real_valued,
            nonnegative,
        } => CVec::from_fn(x.len(), |i, _| {
            if !support[i] {
                return ZERO;
            }
            let mut v = x[i];
            if *real_valued || *nonnegative {
                v.im = 0.0;
            }
            if *nonnegative && v.re < 0.0 {
                v.re = 0.0;
            }
            v
        }),
        PriorSpec::SoftThreshold { p, support } => CVec::from_fn(x.len(), |i, _| {
            if support[i] {
                Complex64::new((x[i].re - p).max(0.0), 0.0)
            } else {
                ZERO
            }
        }),
        PriorSpec::HardThreshold { s, support } => hard_threshold(x, *s, support)?,
    })
}

/// Keep the `s` entries of largest modulus inside the support; ties go to
/// the lower index.
pub fn hard_threshold(x: &CVec, s: usize, support: &[bool]) -> Result<CVec> {
    check_len(x.len(), support.len())?;
    let mut idx: Vec<usize> = (0..x.len()).filter(|&i| support[i]).collect();
    if s > idx.len() {
        return Err(Error::InvalidParameter(format!(
            "hard threshold s = {s} exceeds support size {}",
            idx.len()
        )));
    }
    // stable sort keeps index order among equal moduli
    idx.sort_by(|&a, &b| x[b].norm().total_cmp(&x[a].norm()));
    let mut out = CVec::zeros(x.len());
    for &i in &idx[..s] {
        out[i] = x[i];
    }
    Ok(out)
}

/// Complex soft shrinkage `y_i max(1 - w / |y_i|, 0)`.
pub fn prox_l1(y: &CVec, weight: f64) -> Result<CVec> {
    if !(weight >= 0.0 && weight.is_finite()) {
        return Err(Error::InvalidParameter(format!("l1 weight {weight}")));
    }
    Ok(y.map(|v| {
        let r = v.norm();
        if r <= weight {
            ZERO
        } else {
            v * (1.0 - weight / r)
        }
    }))
}
