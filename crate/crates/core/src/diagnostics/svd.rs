//! One-sided (Hestenes) Jacobi SVD for small dense real matrices.

use crate::error::{Error, Result};
use crate::{RMat, RVec};

const MAX_SWEEPS: usize = 80;

/// `A = U diag(s) V^T` with `s` sorted descending.
///
/// `V` is `q x q` orthogonal and complete even when `A` has fewer rows than
/// columns or zero singular values. Columns of `U` belonging to zero singular
/// values are left at zero.
#[derive(Clone, Debug)]
pub struct JacobiSvd {
    pub u: RMat,
    pub singular_values: RVec,
    pub v: RMat,
    pub sweeps: usize,
}

/// Orthogonalise the columns of `a` by plane rotations.
pub fn jacobi_svd(a: &RMat) -> Result<JacobiSvd> {
    let (p, q) = a.shape();
    let mut w = a.clone();
    let mut v = RMat::identity(q, q);
    let eps = f64::EPSILON;
    // columns below this squared norm are numerically zero and left alone
    let negligible = (eps * a.norm()).powi(2);
    let mut sweeps = 0;
    loop {
        if sweeps == MAX_SWEEPS {
            return Err(Error::SvdNotConverged { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for i in 0..q {
            for j in i + 1..q {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for r in 0..p {
                    let (x, y) = (w[(r, i)], w[(r, j)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if alpha.min(beta) <= negligible || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..p {
                    let (x, y) = (w[(r, i)], w[(r, j)]);
                    w[(r, i)] = c * x - s * y;
                    w[(r, j)] = s * x + c * y;
                }
                for r in 0..q {
                    let (x, y) = (v[(r, i)], v[(r, j)]);
                    v[(r, i)] = c * x - s * y;
                    v[(r, j)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..q).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let scale = norms.iter().copied().fold(0.0, f64::max);
    let mut u = RMat::zeros(p, q);
    let mut vs = RMat::zeros(q, q);
    let mut s = RVec::zeros(q);
    for (k, &j) in order.iter().enumerate() {
        s[k] = norms[j];
        vs.set_column(k, &v.column(j));
        if norms[j] > eps * scale * (p.max(q) as f64) && norms[j] > 0.0 {
            u.set_column(k, &(w.column(j) / norms[j]));
        }
    }
    Ok(JacobiSvd { u, singular_values: s, v: vs, sweeps })
}

/// Singular values only, descending, `min(p, q)` of them.
pub fn singular_values(a: &RMat) -> Result<RVec> {
    let (p, q) = a.shape();
    // orthogonalise along the shorter side
    let svd = if p >= q { jacobi_svd(a)? } else { jacobi_svd(&a.transpose())? };
    Ok(svd.singular_values.rows(0, p.min(q)).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rng::{real_gaussian_vector, rng_from_seed};

    fn random(p: usize, q: usize, seed: u64) -> RMat {
        let mut r = rng_from_seed(seed);
        let v = real_gaussian_vector(&mut r, p * q);
        RMat::from_iterator(p, q, v.iter().copied())
    }

    #[test]
    fn matches_nalgebra_values() {
        for (p, q, seed) in [(7, 4, 1), (4, 7, 2), (6, 6, 3), (12, 20, 4)] {
            let a = random(p, q, seed);
            let ours = singular_values(&a).unwrap();
            let mut theirs: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
            theirs.sort_by(|x, y| y.total_cmp(x));
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-12 * theirs[0], "{x} vs {y}");
            }
        }
    }

    #[test]
    fn reconstructs_tall_matrix() {
        let a = random(9, 5, 5);
        let svd = jacobi_svd(&a).unwrap();
        let rebuilt = &svd.u * RMat::from_diagonal(&svd.singular_values) * svd.v.transpose();
        assert!((rebuilt - &a).amax() < 1e-12);
        assert!((svd.v.transpose() * &svd.v - RMat::identity(5, 5)).amax() < 1e-13);
        assert!((svd.u.transpose() * &svd.u - RMat::identity(5, 5)).amax() < 1e-12);
    }

    #[test]
    fn wide_input_keeps_complete_rotation() {
        // 3 x 5: two columns must collapse to zero, V stays orthogonal
        let a = random(3, 5, 6);
        let svd = jacobi_svd(&a).unwrap();
        assert!((svd.v.transpose() * &svd.v - RMat::identity(5, 5)).amax() < 1e-13);
        assert!(svd.singular_values[3] < 1e-12 && svd.singular_values[4] < 1e-12);
        assert!((&a * svd.v.column(4)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_input() {
        let a = RMat::from_diagonal(&RVec::from_vec(vec![1.0, 3.0, 2.0]));
        let s = singular_values(&a).unwrap();
        assert_eq!(s.as_slice(), &[3.0, 2.0, 1.0]);
    }
}
