//! Dense complex Cholesky factorisation `M = L L*` with triangular solves.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::{CMat, CVec};

/// Relative tolerance for the hermitian check.
const HERMITIAN_TOL: f64 = 1e-12;

/// Lower-triangular factor with positive real diagonal.
#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    l: CMat,
}

/// Factor a hermitian positive-definite matrix.
pub fn cholesky(m: &CMat) -> Result<CholeskyFactor> {
    let n = m.nrows();
    check_len(n, m.ncols())?;
    let scale = m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let mut asym = 0.0f64;
    for j in 0..n {
        for i in j..n {
            asym = asym.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if asym > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian(asym));
    }

    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(CholeskyFactor { l })
}

impl CholeskyFactor {
    /// Wrap an existing lower factor (diagonal must be real and positive).
    pub fn from_lower(l: CMat) -> Result<Self> {
        check_len(l.nrows(), l.ncols())?;
        for i in 0..l.nrows() {
            let d = l[(i, i)];
            if !(d.re > 0.0 && d.im == 0.0) {
                return Err(Error::NotPositiveDefinite {
                    index: i,
                    pivot: d.re,
                });
            }
        }
        Ok(Self {
            l: l.lower_triangle(),
        })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn lower(&self) -> &CMat {
        &self.l
    }

    /// `L^{-1} b` by forward substitution.
    pub fn solve_lower(&self, b: &CVec) -> Result<CVec> {
        check_len(self.dim(), b.len())?;
        let n = self.dim();
        let mut x = b.clone();
        // column-oriented to walk L contiguously
        for j in 0..n {
            let xj = x[j] / self.l[(j, j)].re;
            x[j] = xj;
            for i in j + 1..n {
                x[i] -= self.l[(i, j)] * xj;
            }
        }
        Ok(x)
    }

    /// `L^{-*} b` by backward substitution.
    pub fn solve_upper(&self, b: &CVec) -> Result<CVec> {
        check_len(self.dim(), b.len())?;
        let n = self.dim();
        let mut x = b.clone();
        for j in (0..n).rev() {
            let mut s = x[j];
            for i in j + 1..n {
                s -= self.l[(i, j)].conj() * x[i];
            }
            x[j] = s / self.l[(j, j)].re;
        }
        Ok(x)
    }

    /// Solve `(L L*) x = b`.
    pub fn solve(&self, b: &CVec) -> Result<CVec> {
        self.solve_upper(&self.solve_lower(b)?)
    }

    /// `L^{-1} B` column by column.
    pub fn solve_lower_matrix(&self, b: &CMat) -> Result<CMat> {
        check_len(self.dim(), b.nrows())?;
        let mut out = CMat::zeros(b.nrows(), b.ncols());
        for c in 0..b.ncols() {
            out.set_column(c, &self.solve_lower(&b.column(c).into_owned())?);
        }
        Ok(out)
    }
}

/// Free-function form of [`CholeskyFactor::solve`].
pub fn solve_factored(factor: &CholeskyFactor, rhs: &CVec) -> Result<CVec> {
    factor.solve(rhs)
}
