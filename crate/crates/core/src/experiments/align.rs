//! Registration of Fourier reconstructions against the truth over the
//! trivial ambiguities: circular shift, point reflection and global phase.

use crate::error::{check_len, Result};
use crate::model::rel_err;
use crate::CVec;

/// The four axis-reflection states of a `gh x gw` grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mirror {
    pub flip_rows: bool,
    pub flip_cols: bool,
}

impl Mirror {
    pub const ALL: [Mirror; 4] = [
        Mirror { flip_rows: false, flip_cols: false },
        Mirror { flip_rows: true, flip_cols: false },
        Mirror { flip_rows: false, flip_cols: true },
        Mirror { flip_rows: true, flip_cols: true },
    ];
}

/// `x` reflected (`r -> -r mod gh` etc.) and then circularly shifted by
/// `(dr, dc)`.
pub fn transform(x: &CVec, gh: usize, gw: usize, mirror: Mirror, dr: usize, dc: usize) -> CVec {
    CVec::from_fn(gh * gw, |k, _| {
        let (r, c) = (k / gw, k % gw);
        // source pixel of the output (r, c)
        let mut sr = (r + gh - dr) % gh;
        let mut sc = (c + gw - dc) % gw;
        if mirror.flip_rows {
            sr = (gh - sr) % gh;
        }
        if mirror.flip_cols {
            sc = (gw - sc) % gw;
        }
        x[sr * gw + sc]
    })
}

/// Smallest phase-aligned relative error over all reflections and shifts.
pub fn aligned_rel_err(x: &CVec, truth: &CVec, gh: usize, gw: usize) -> Result<f64> {
    check_len(gh * gw, x.len())?;
    check_len(gh * gw, truth.len())?;
    let mut best = f64::INFINITY;
    for mirror in Mirror::ALL {
        for dr in 0..gh {
            for dc in 0..gw {
                let e = rel_err(&transform(x, gh, gw, mirror, dr, dc), truth)?;
                best = best.min(e);
            }
        }
    }
    Ok(best)
}
