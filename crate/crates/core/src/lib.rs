//! Phase retrieval with prior information via graph projection splitting.
//!
//! The crate is organised around the stacked formulation
//! `min f(y) + g(x)  s.t.  A* x = y`, where `f` is the indicator of the
//! amplitude set `{y : |y| = b}` and `g` encodes prior knowledge on the
//! signal. Modules:
//!
//! - [`model`]: sampling ensembles, problem instances, noise, error metrics and file I/O.
//! - [`graph_projection`]: Cholesky / CG kernels and the projection onto `{(x, y) : A* x = y}`.
//! - [`prox`]: proximal maps for the amplitude constraint and the supported priors.
//! - [`solvers`]: GPS, RGPS, DR, RDR, the three-block TV solver and an HIO baseline.
//! - [`diagnostics`]: local-convergence constants (singular structure, contraction factors, `t_max`).
//! - [`experiments`]: Monte-Carlo harnesses and table emission.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod graph_projection;
pub mod model;
pub mod prox;
pub mod solvers;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Complex column vector.
pub type CVec = nalgebra::DVector<Complex64>;
/// Complex dense matrix (column-major).
pub type CMat = nalgebra::DMatrix<Complex64>;
/// Real column vector.
pub type RVec = nalgebra::DVector<f64>;
/// Real dense matrix.
pub type RMat = nalgebra::DMatrix<f64>;
