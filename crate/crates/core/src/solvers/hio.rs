//! Fienup's hybrid input-output iteration for oversampled Fourier data with
//! support, real-valuedness and nonnegativity constraints.

use rand::Rng;

use crate::error::{check_len, Error, Result};
use crate::model::rng::rng_from_seed;
use crate::model::SamplingEnsemble;
use crate::prox::prox_amplitude;
use crate::{CVec, Complex64, RVec};

/// Result of one HIO iteration.
pub struct HioStep {
    /// Next iterate.
    pub x: CVec,
    /// Constraint-satisfying estimate: the modulus-corrected image with
    /// pixels outside the constraint set zeroed.
    pub estimate: CVec,
}

pub fn hio_step(
    x: &CVec,
    ensemble: &SamplingEnsemble,
    b: &RVec,
    support: &[bool],
    beta: f64,
) -> Result<HioStep> {
    let l = ensemble
        .isometry_scale()
        .ok_or_else(|| Error::InvalidParameter("HIO needs A A* = l I".into()))?;
    check_len(ensemble.n(), support.len())?;
    let p = prox_amplitude(&ensemble.forward(x), b)?;
    let back = ensemble.backward(&p);
    let n = x.len();
    let mut next = CVec::zeros(n);
    let mut estimate = CVec::zeros(n);
    for i in 0..n {
        let v = back[i].re / l;
        if support[i] && v >= 0.0 {
            next[i] = Complex64::new(v, 0.0);
            estimate[i] = next[i];
        } else {
            next[i] = Complex64::new(x[i].re - beta * v, 0.0);
        }
    }
    Ok(HioStep { x: next, estimate })
}

/// Uniform `[0, 1)` pixels on the support, zero elsewhere.
pub fn hio_init(n: usize, support: &[bool], seed: u64) -> CVec {
    let mut rng = rng_from_seed(seed);
    CVec::from_fn(n, |i, _| {
        let v: f64 = rng.random();
        Complex64::new(if support[i] { v } else { 0.0 }, 0.0)
    })
}

/// Run `iters` HIO steps from `x0` and return the final estimate.
pub fn run_hio_from(
    ensemble: &SamplingEnsemble,
    b: &RVec,
    support: &[bool],
    beta: f64,
    iters: usize,
    x0: CVec,
) -> Result<CVec> {
    let mut x = x0;
    let mut est = x.clone();
    for _ in 0..iters {
        let s = hio_step(&x, ensemble, b, support, beta)?;
        x = s.x;
        est = s.estimate;
    }
    Ok(est)
}

/// Random start on the support, then `iters` HIO steps.
pub fn run_hio(
    ensemble: &SamplingEnsemble,
    b: &RVec,
    support: &[bool],
    beta: f64,
    iters: usize,
    seed: u64,
) -> Result<CVec> {
    check_len(ensemble.n(), support.len())?;
    let x0 = hio_init(ensemble.n(), support, seed);
    run_hio_from(ensemble, b, support, beta, iters, x0)
}
