//! Forward-difference total-variation operator on a row-major grid.

use crate::error::{check_len, Error, Result};
use crate::{CMat, CVec, Complex64};

/// `D : C^{hw} -> C^{2hw}`; the first `hw` outputs are horizontal
/// differences `x[r, c+1] - x[r, c]`, the next `hw` vertical differences
/// `x[r+1, c] - x[r, c]`. Entries at the last column / last row are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TvOperator {
    height: usize,
    width: usize,
}

impl TvOperator {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidParameter("tv grid must be non-empty".into()));
        }
        Ok(Self { height, width })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Length of the input vector.
    pub fn input_len(&self) -> usize {
        self.height * self.width
    }

    pub fn output_len(&self) -> usize {
        2 * self.input_len()
    }

    pub fn apply(&self, x: &CVec) -> CVec {
        debug_assert_eq!(x.len(), self.input_len());
        let (h, w) = (self.height, self.width);
        let n = h * w;
        let mut out = CVec::zeros(2 * n);
        for r in 0..h {
            for c in 0..w {
                let k = r * w + c;
                if c + 1 < w {
                    out[k] = x[k + 1] - x[k];
                }
                if r + 1 < h {
                    out[n + k] = x[k + w] - x[k];
                }
            }
        }
        out
    }

    /// `D* z`.
    pub fn adjoint(&self, z: &CVec) -> CVec {
        debug_assert_eq!(z.len(), self.output_len());
        let (h, w) = (self.height, self.width);
        let n = h * w;
        let mut out = CVec::zeros(n);
        for r in 0..h {
            for c in 0..w {
                let k = r * w + c;
                if c + 1 < w {
                    out[k + 1] += z[k];
                    out[k] -= z[k];
                }
                if r + 1 < h {
                    out[k + w] += z[n + k];
                    out[k] -= z[n + k];
                }
            }
        }
        out
    }

    pub fn apply_checked(&self, x: &CVec) -> Result<CVec> {
        check_len(self.input_len(), x.len())?;
        Ok(self.apply(x))
    }

    /// Dense `2hw x hw` matrix of `D`.
    pub fn to_dense(&self) -> CMat {
        let n = self.input_len();
        let mut d = CMat::zeros(2 * n, n);
        for k in 0..n {
            let mut e = CVec::zeros(n);
            e[k] = Complex64::new(1.0, 0.0);
            d.set_column(k, &self.apply(&e));
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rng::{gaussian_vector, rng_from_seed};
    use crate::model::FieldKind;

    #[test]
    fn adjoint_identity() {
        let d = TvOperator::new(5, 3).unwrap();
        let mut r = rng_from_seed(4);
        for _ in 0..10 {
            let x = gaussian_vector(&mut r, 15, FieldKind::Complex);
            let z = gaussian_vector(&mut r, 30, FieldKind::Complex);
            let lhs = d.apply(&x).dotc(&z);
            let rhs = x.dotc(&d.adjoint(&z));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_image_has_zero_variation() {
        let d = TvOperator::new(3, 4).unwrap();
        let x = CVec::from_element(12, Complex64::new(2.5, -1.0));
        assert_eq!(d.apply(&x), CVec::zeros(24));
    }

    #[test]
    fn small_grid_layout() {
        // [[1, 2], [4, 8]]
        let d = TvOperator::new(2, 2).unwrap();
        let x = CVec::from_iterator(4, [1.0, 2.0, 4.0, 8.0].map(|v| Complex64::new(v, 0.0)));
        let y: Vec<f64> = d.apply(&x).iter().map(|z| z.re).collect();
        assert_eq!(y, vec![1.0, 0.0, 4.0, 0.0, 3.0, 6.0, 0.0, 0.0]);
    }
}
