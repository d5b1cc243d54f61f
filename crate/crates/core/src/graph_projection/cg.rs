//! Matrix-free conjugate gradients for hermitian positive-definite systems.

use crate::error::{Error, Result};
use crate::{CVec, Complex64};

pub const DEFAULT_CG_TOL: f64 = 1e-8;
pub const DEFAULT_CG_MAX_ITER: usize = 500;

#[derive(Clone, Debug)]
pub struct CgSolution {
    pub x: CVec,
    pub iterations: usize,
    /// `|apply(x) - rhs| / |rhs|` (0 for a zero right-hand side).
    pub relative_residual: f64,
    pub converged: bool,
}

/// Solve `apply(x) = rhs` starting from `x = 0`.
///
/// Stops once the recursively updated residual satisfies
/// `|r| <= tol |rhs|`, or after `max_iter` iterations with
/// `converged = false`. A non-positive curvature `p* A p` is a breakdown.
pub fn conjugate_gradient<F>(apply: F, rhs: &CVec, tol: f64, max_iter: usize) -> Result<CgSolution>
where
    F: Fn(&CVec) -> CVec,
{
    let b_norm = rhs.norm();
    let mut x = CVec::zeros(rhs.len());
    if b_norm == 0.0 {
        return Ok(CgSolution {
            x,
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        });
    }
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = r.norm_squared();
    let target = tol * b_norm;
    let mut iterations = 0;
    while iterations < max_iter {
        let ap = apply(&p);
        let curv = p.dotc(&ap).re;
        if !(curv > 0.0 && curv.is_finite()) {
            return Err(Error::CgBreakdown {
                iteration: iterations,
            });
        }
        let alpha = rr / curv;
        x.axpy(alpha.into(), &p, 1.0.into());
        r.axpy((-alpha).into(), &ap, 1.0.into());
        iterations += 1;
        let rr_new = r.norm_squared();
        if rr_new.sqrt() <= target {
            rr = rr_new;
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        p = &r + &p * Complex64::from(beta);
    }
    let relative_residual = rr.sqrt() / b_norm;
    Ok(CgSolution {
        x,
        iterations,
        relative_residual,
        converged: relative_residual <= tol,
    })
}
