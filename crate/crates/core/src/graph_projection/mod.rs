//! Projection onto the graph set `C = {(x, y) : A* x = y}` and its relaxed
//! and three-block (TV) variants.

mod cg;
mod cholesky;
pub mod tv;

pub use cg::{conjugate_gradient, CgSolution, DEFAULT_CG_MAX_ITER, DEFAULT_CG_TOL};
pub use cholesky::{cholesky, solve_factored, CholeskyFactor};
pub use tv::TvOperator;

use crate::error::{check_len, Error, Result};
use crate::model::SamplingEnsemble;
use crate::{CMat, CVec, Complex64};

/// Which linear system the projector solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    /// `(I + A A*) x = c + A d`, requires nothing beyond a dense `A`.
    Tall,
    /// `(I + A* A) y = A*(c + A d)`.
    Wide,
    /// `x = (c + A d) / (1 + l)` for `A A* = l I`.
    Isometric,
}

#[derive(Clone, Debug)]
enum Branch {
    Tall(CholeskyFactor),
    Wide(CholeskyFactor),
    Isometric(f64),
}

/// Precomputed solver for the graph projection of one ensemble.
#[derive(Clone, Debug)]
pub struct GraphProjector<'a> {
    ensemble: &'a SamplingEnsemble,
    branch: Branch,
}

fn gram_plus_identity(a: &CMat, outer: bool) -> CMat {
    let g = if outer {
        a * a.adjoint()
    } else {
        a.adjoint() * a
    };
    let k = g.nrows();
    g + CMat::identity(k, k)
}

impl<'a> GraphProjector<'a> {
    /// Isometric ensembles use the closed form; otherwise the tall branch
    /// for `m >= n` and the wide branch for `m < n`.
    pub fn build(ensemble: &'a SamplingEnsemble) -> Result<Self> {
        let kind = if ensemble.isometry_scale().is_some() {
            BranchKind::Isometric
        } else if ensemble.m() >= ensemble.n() {
            BranchKind::Tall
        } else {
            BranchKind::Wide
        };
        Self::with_branch(ensemble, kind)
    }

    /// Build a specific branch, materialising operator-form ensembles when a
    /// factorisation is requested.
    pub fn with_branch(ensemble: &'a SamplingEnsemble, kind: BranchKind) -> Result<Self> {
        let branch = match kind {
            BranchKind::Isometric => {
                Branch::Isometric(ensemble.isometry_scale().ok_or_else(|| {
                    Error::InvalidParameter("isometric branch needs A A* = l I".into())
                })?)
            }
            BranchKind::Tall | BranchKind::Wide => {
                let owned;
                let a = match ensemble.dense_matrix() {
                    Some(a) => a,
                    None => {
                        owned = ensemble.to_dense();
                        &owned
                    }
                };
                let outer = kind == BranchKind::Tall;
                let factor = cholesky(&gram_plus_identity(a, outer))?;
                if outer {
                    Branch::Tall(factor)
                } else {
                    Branch::Wide(factor)
                }
            }
        };
        Ok(Self { ensemble, branch })
    }

    pub fn ensemble(&self) -> &'a SamplingEnsemble {
        self.ensemble
    }

    pub fn branch(&self) -> BranchKind {
        match self.branch {
            Branch::Tall(_) => BranchKind::Tall,
            Branch::Wide(_) => BranchKind::Wide,
            Branch::Isometric(_) => BranchKind::Isometric,
        }
    }

    /// Cholesky factor of `I + A A*` (tall branch only).
    pub fn tall_factor(&self) -> Option<&CholeskyFactor> {
        match &self.branch {
            Branch::Tall(f) => Some(f),
            _ => None,
        }
    }

    /// Nearest point of `C` to `(c, d)`.
    pub fn project(&self, c: &CVec, d: &CVec) -> Result<(CVec, CVec)> {
        let ens = self.ensemble;
        check_len(ens.n(), c.len())?;
        check_len(ens.m(), d.len())?;
        let rhs = c + ens.backward(d);
        match &self.branch {
            Branch::Tall(f) => {
                let x = f.solve(&rhs)?;
                let y = ens.forward(&x);
                Ok((x, y))
            }
            Branch::Isometric(l) => {
                let x = rhs / Complex64::new(1.0 + l, 0.0);
                let y = ens.forward(&x);
                Ok((x, y))
            }
            Branch::Wide(f) => {
                let y = f.solve(&ens.forward(&rhs))?;
                let x = c + ens.backward(&(d - &y));
                Ok((x, y))
            }
        }
    }

    /// `t (c, d) + (1 - t) project(c, d)` for `0 <= t < 1`.
    pub fn project_relaxed(&self, t: f64, c: &CVec, d: &CVec) -> Result<(CVec, CVec)> {
        check_relaxation(t)?;
        let (x, y) = self.project(c, d)?;
        if t == 0.0 {
            return Ok((x, y));
        }
        Ok((relax(t, c, x), relax(t, d, y)))
    }
}

pub(crate) fn check_relaxation(t: f64) -> Result<()> {
    if (0.0..1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "relaxation t = {t} outside [0, 1)"
        )))
    }
}

/// `t a + (1 - t) p`.
pub(crate) fn relax(t: f64, a: &CVec, p: CVec) -> CVec {
    p * Complex64::from(1.0 - t) + a * Complex64::from(t)
}

/// Orthogonal projector onto `range(A*)` in measurement space, used by the
/// single-variable DR iterations. Requires `m >= n`.
#[derive(Clone, Debug)]
pub struct RangeProjector<'a> {
    ensemble: &'a SamplingEnsemble,
    gram: RangeGram,
}

#[derive(Clone, Debug)]
enum RangeGram {
    Factor(CholeskyFactor),
    Scale(f64),
}

impl<'a> RangeProjector<'a> {
    pub fn build(ensemble: &'a SamplingEnsemble) -> Result<Self> {
        if ensemble.m() < ensemble.n() {
            return Err(Error::Config(format!(
                "measurement-space DR needs m >= n (m = {}, n = {})",
                ensemble.m(),
                ensemble.n()
            )));
        }
        let gram = match (ensemble.isometry_scale(), ensemble.dense_matrix()) {
            (Some(l), _) => RangeGram::Scale(l),
            (None, Some(a)) => RangeGram::Factor(cholesky(&(a * a.adjoint()))?),
            (None, None) => RangeGram::Factor(cholesky(&{
                let a = ensemble.to_dense();
                &a * a.adjoint()
            })?),
        };
        Ok(Self { ensemble, gram })
    }

    pub fn ensemble(&self) -> &'a SamplingEnsemble {
        self.ensemble
    }

    /// `(A A*)^{-1} A z`: the signal whose measurements are closest to `z`.
    pub fn recover(&self, z: &CVec) -> Result<CVec> {
        check_len(self.ensemble.m(), z.len())?;
        let az = self.ensemble.backward(z);
        match &self.gram {
            RangeGram::Factor(f) => f.solve(&az),
            RangeGram::Scale(l) => Ok(az / Complex64::new(*l, 0.0)),
        }
    }

    /// `A* (A A*)^{-1} A z`.
    pub fn project(&self, z: &CVec) -> Result<CVec> {
        Ok(self.ensemble.forward(&self.recover(z)?))
    }

    /// `t z + (1 - t) project(z)`.
    pub fn project_relaxed(&self, t: f64, z: &CVec) -> Result<CVec> {
        check_relaxation(t)?;
        let p = self.project(z)?;
        if t == 0.0 {
            return Ok(p);
        }
        Ok(relax(t, z, p))
    }
}

/// Output of the three-block projection.
#[derive(Clone, Debug)]
pub struct TvProjection {
    pub x: CVec,
    pub y1: CVec,
    pub y2: CVec,
    pub cg_iterations: usize,
}

/// Projection onto `{(x, y1, y2) : y1 = A* x, y2 = D x}` for an ensemble with
/// `A A* = l I`, solving `((1 + l) I + D* D) x = c + A d1 + D* d2` by CG.
/// With `tv = None` the third block is absent and `d2` is ignored.
pub fn project_tv(
    ensemble: &SamplingEnsemble,
    tv: Option<&TvOperator>,
    c: &CVec,
    d1: &CVec,
    d2: &CVec,
    cg_tol: f64,
    cg_max: usize,
) -> Result<TvProjection> {
    let l = ensemble
        .isometry_scale()
        .ok_or_else(|| Error::InvalidParameter("three-block projection needs A A* = l I".into()))?;
    check_len(ensemble.n(), c.len())?;
    check_len(ensemble.m(), d1.len())?;
    let mut rhs = c + ensemble.backward(d1);
    let (x, cg_iterations) = match tv {
        None => (rhs / Complex64::new(1.0 + l, 0.0), 0),
        Some(d) => {
            check_len(ensemble.n(), d.input_len())?;
            check_len(d.output_len(), d2.len())?;
            rhs += d.adjoint(d2);
            let sol = conjugate_gradient(
                |v| v * Complex64::from(1.0 + l) + d.adjoint(&d.apply(v)),
                &rhs,
                cg_tol,
                cg_max,
            )?;
            if !sol.converged {
                return Err(Error::CgNotConverged {
                    iterations: sol.iterations,
                    residual: sol.relative_residual,
                });
            }
            (sol.x, sol.iterations)
        }
    };
    let y1 = ensemble.forward(&x);
    let y2 = match tv {
        Some(d) => d.apply(&x),
        None => CVec::zeros(0),
    };
    Ok(TvProjection {
        x,
        y1,
        y2,
        cg_iterations,
    })
}
