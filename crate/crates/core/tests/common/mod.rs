//! Independent dense oracles shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use phasegraph::model::rng::{gaussian_vector, rng_from_seed};
use phasegraph::model::{FieldKind, PriorSpec};
use phasegraph::prox::{prox_amplitude, prox_prior};
use phasegraph::{CMat, CVec, Complex64, RVec};

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn field_of(complex: bool) -> FieldKind {
    if complex {
        FieldKind::Complex
    } else {
        FieldKind::Real
    }
}

pub fn random_cvec(len: usize, field: FieldKind, seed: u64) -> CVec {
    gaussian_vector(&mut rng_from_seed(seed), len, field)
}

pub fn random_cmat(rows: usize, cols: usize, field: FieldKind, seed: u64) -> CMat {
    let v = random_cvec(rows * cols, field, seed);
    CMat::from_column_slice(rows, cols, v.as_slice())
}

/// Projection of `(c, d)` onto `{(x, y) : A* x = y}` from the full KKT system
///
/// ```text
/// [ I   0   A ] [x]   [c]
/// [ 0   I  -I ] [y] = [d]
/// [ A* -I   0 ] [mu]  [0]
/// ```
///
/// solved by LU.
pub fn kkt_projection(a: &CMat, c: &CVec, d: &CVec) -> (CVec, CVec) {
    let (n, m) = a.shape();
    let size = n + 2 * m;
    let mut k = DMatrix::<Complex64>::zeros(size, size);
    for i in 0..n {
        k[(i, i)] = Complex64::new(1.0, 0.0);
    }
    for j in 0..m {
        k[(n + j, n + j)] = Complex64::new(1.0, 0.0);
        k[(n + j, n + m + j)] = Complex64::new(-1.0, 0.0);
        k[(n + m + j, n + j)] = Complex64::new(-1.0, 0.0);
    }
    let astar = a.adjoint();
    for i in 0..n {
        for j in 0..m {
            k[(i, n + m + j)] = a[(i, j)];
            k[(n + m + j, i)] = astar[(j, i)];
        }
    }
    let mut rhs = CVec::zeros(size);
    rhs.rows_mut(0, n).copy_from(c);
    rhs.rows_mut(n, m).copy_from(d);
    let sol = k.lu().solve(&rhs).expect("KKT system is nonsingular");
    (sol.rows(0, n).into_owned(), sol.rows(n, m).into_owned())
}

/// Textbook scaled ADMM on `min f(w_y) + g(w_x)  s.t.  w = v, v in C`:
/// `v = P_C(w - u); w = prox(v + u); u = u + v - w`, with `P_C` from
/// [`kkt_projection`] and relaxation `t` applied as `t (w - u) + (1 - t) P_C`.
/// Returns the `x` block of `w` after each iteration.
pub fn admm_x_sequence(
    a: &CMat,
    b: &RVec,
    prior: &PriorSpec,
    x0: &CVec,
    t: f64,
    iters: usize,
) -> Vec<CVec> {
    let mut wx = x0.clone();
    let mut wy = a.adjoint() * x0;
    let mut ux = CVec::zeros(wx.len());
    let mut uy = CVec::zeros(wy.len());
    let mut out = Vec::with_capacity(iters);
    for _ in 0..iters {
        let cx = &wx - &ux;
        let cy = &wy - &uy;
        let (px, py) = kkt_projection(a, &cx, &cy);
        let vx = &cx * c(t) + px * c(1.0 - t);
        let vy = &cy * c(t) + py * c(1.0 - t);
        let nx = prox_prior(&(&vx + &ux), prior).unwrap();
        let ny = prox_amplitude(&(&vy + &uy), b).unwrap();
        ux += &vx - &nx;
        uy += &vy - &ny;
        wx = nx;
        wy = ny;
        out.push(wx.clone());
    }
    out
}

/// Phase-aligned relative error computed directly: the optimal unit `alpha`
/// is the phase of `<truth, x>`.
pub fn aligned_error(x: &CVec, truth: &CVec) -> f64 {
    let inner = truth.dotc(x);
    let alpha = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        c(1.0)
    };
    (x - truth * alpha).norm() / truth.norm()
}

pub fn max_abs_diff(a: &CVec, b: &CVec) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
