//! Matrix-free oversampled 2D Fourier sampling.
//!
//! The signal lives on the zero-padded grid of size `(pad*h) x (pad*w)` in
//! row-major order; the known support is the top-left `h x w` block. The
//! forward map is `A* x = s * DFT2(x)` (unnormalised DFT), so
//! `A A* = s^2 * H * W * I`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::{CMat, CVec};

#[derive(Clone)]
pub struct FourierOperator {
    height: usize,
    width: usize,
    pad_factor: usize,
    scale: f64,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierOperator")
            .field("height", &self.height)
            .field("width", &self.width)
            .field("pad_factor", &self.pad_factor)
            .field("scale", &self.scale)
            .finish()
    }
}

impl FourierOperator {
    pub fn new(height: usize, width: usize, pad_factor: usize, scale: f64) -> Result<Self> {
        if height == 0 || width == 0 || pad_factor == 0 {
            return Err(Error::InvalidParameter(
                "fourier dimensions and pad factor must be >= 1".into(),
            ));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("fourier scale {scale}")));
        }
        let overflow = || Error::InvalidParameter("padded grid size overflows".into());
        let gh = height.checked_mul(pad_factor).ok_or_else(overflow)?;
        let gw = width.checked_mul(pad_factor).ok_or_else(overflow)?;
        let total = gh.checked_mul(gw).ok_or_else(overflow)?;
        // keep room for the real/imag doubling done by callers
        total.checked_mul(16).ok_or_else(overflow)?;

        let mut planner = FftPlanner::new();
        Ok(Self {
            height,
            width,
            pad_factor,
            scale,
            row_fwd: planner.plan_fft_forward(gw),
            row_inv: planner.plan_fft_inverse(gw),
            col_fwd: planner.plan_fft_forward(gh),
            col_inv: planner.plan_fft_inverse(gh),
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pad_factor(&self) -> usize {
        self.pad_factor
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Rows of the padded grid.
    pub fn grid_height(&self) -> usize {
        self.height * self.pad_factor
    }

    /// Columns of the padded grid.
    pub fn grid_width(&self) -> usize {
        self.width * self.pad_factor
    }

    pub fn len(&self) -> usize {
        self.grid_height() * self.grid_width()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `l` in `A A* = l I`.
    pub fn isometry_scale(&self) -> f64 {
        self.scale * self.scale * self.len() as f64
    }

    /// Indicator of the original (unpadded) image region.
    pub fn support_mask(&self) -> Vec<bool> {
        let gw = self.grid_width();
        (0..self.len())
            .map(|k| k / gw < self.height && k % gw < self.width)
            .collect()
    }

    /// `A* x`: scaled 2D DFT.
    pub fn forward(&self, x: &CVec) -> CVec {
        self.transform(x, &self.row_fwd, &self.col_fwd)
    }

    /// `A y`: scaled 2D inverse DFT without the `1/N` factor.
    pub fn backward(&self, y: &CVec) -> CVec {
        self.transform(y, &self.row_inv, &self.col_inv)
    }

    fn transform(&self, v: &CVec, row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) -> CVec {
        let gh = self.grid_height();
        let gw = self.grid_width();
        let mut buf: Vec<Complex64> = v.iter().copied().collect();
        row.process(&mut buf);
        let mut cols = vec![Complex64::new(0.0, 0.0); buf.len()];
        for r in 0..gh {
            for c in 0..gw {
                cols[c * gh + r] = buf[r * gw + c];
            }
        }
        col.process(&mut cols);
        let s = self.scale;
        CVec::from_fn(gh * gw, |k, _| cols[(k % gw) * gh + k / gw] * s)
    }

    /// Dense `n x m` matrix whose columns are the sampling vectors.
    pub fn to_dense(&self) -> CMat {
        let n = self.len();
        // A = (A*)^H; column k of A* is forward(e_k)
        let mut a_star = CMat::zeros(n, n);
        for k in 0..n {
            let mut e = CVec::zeros(n);
            e[k] = Complex64::new(1.0, 0.0);
            a_star.set_column(k, &self.forward(&e));
        }
        a_star.adjoint()
    }
}
