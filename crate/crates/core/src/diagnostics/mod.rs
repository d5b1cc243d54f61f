//! Local-convergence quantities: the isometry `B = C Omega`, the singular
//! structure of its realification, the contraction constants and `t_max`,
//! and empirical rate fits.

pub mod svd;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph_projection::{cholesky, GraphProjector};
use crate::model::{PriorSpec, ProblemInstance, SamplingEnsemble};
use crate::solvers::dr::stacked_fixed_point_residual;
use crate::solvers::{GpsState, Trace};
use crate::{CMat, CVec, Complex64, RMat, RVec};

pub use svd::{jacobi_svd, singular_values, JacobiSvd};

/// `(Re z; Im z)`.
pub fn realify(z: &CVec) -> RVec {
    let k = z.len();
    RVec::from_fn(2 * k, |i, _| if i < k { z[i].re } else { z[i - k].im })
}

/// Inverse of [`realify`].
pub fn complexify(v: &RVec) -> Result<CVec> {
    if v.len() % 2 != 0 {
        return Err(Error::InvalidParameter("odd-length realified vector".into()));
    }
    let k = v.len() / 2;
    Ok(CVec::from_fn(k, |i, _| Complex64::new(v[i], v[i + k])))
}

/// `(Re B; Im B)`.
pub fn realify_matrix(b: &CMat) -> RMat {
    let (r, c) = b.shape();
    RMat::from_fn(2 * r, c, |i, j| if i < r { b[(i, j)].re } else { b[(i - r, j)].im })
}

/// How to treat zero entries of `x_ref` or `A* x_ref` whose phase is undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZeroPhase {
    #[default]
    Reject,
    /// Use phase 1; outside the standing assumptions of the theory.
    FillOne,
}

fn phases(v: &CVec, what: &'static str, policy: ZeroPhase) -> Result<CVec> {
    let mut out = CVec::zeros(v.len());
    for (i, z) in v.iter().enumerate() {
        let r = z.norm();
        out[i] = if r > 0.0 {
            z / r
        } else if policy == ZeroPhase::FillOne {
            Complex64::new(1.0, 0.0)
        } else {
            return Err(Error::ZeroPhase { what, index: i });
        };
    }
    Ok(out)
}

/// Ingredients of `B` kept for the diagnostics.
#[derive(Clone, Debug)]
pub struct BMatrix {
    /// `n x (n + m)`.
    pub b: CMat,
    /// Lower Cholesky factor of `I + A A*`.
    pub l: CMat,
    pub omega_x: CVec,
    pub omega_y: CVec,
}

/// `B = [L^{-1}, L^{-1} A] diag(x/|x|, y/|y|)` with `y = A* x_ref`.
pub fn build_b(ensemble: &SamplingEnsemble, x_ref: &CVec, policy: ZeroPhase) -> Result<BMatrix> {
    check_len(ensemble.n(), x_ref.len())?;
    let a = ensemble.to_dense();
    let (n, m) = a.shape();
    let factor = cholesky(&(&a * a.adjoint() + CMat::identity(n, n)))?;
    let omega_x = phases(x_ref, "x_ref", policy)?;
    let omega_y = phases(&ensemble.forward(x_ref), "A* x_ref", policy)?;
    let mut c = CMat::zeros(n, n + m);
    c.view_mut((0, 0), (n, n))
        .copy_from(&factor.solve_lower_matrix(&CMat::identity(n, n))?);
    c.view_mut((0, n), (n, m)).copy_from(&factor.solve_lower_matrix(&a)?);
    for j in 0..n + m {
        let w = if j < n { omega_x[j] } else { omega_y[j - n] };
        for i in 0..n {
            c[(i, j)] *= w;
        }
    }
    Ok(BMatrix {
        b: c,
        l: factor.lower().clone(),
        omega_x,
        omega_y,
    })
}

/// Singular values and left singular vectors of `G(B)`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// `2n` values, descending.
    pub values: RVec,
    /// `2n x 2n`; column `i` pairs with `values[i]`.
    pub left_vectors: RMat,
}

impl Spectrum {
    pub fn sigma2(&self) -> f64 {
        self.values.get(1).copied().unwrap_or(0.0)
    }

    /// `max_i |sigma_i^2 + sigma_{2n+1-i}^2 - 1|`.
    pub fn pairing_defect(&self) -> f64 {
        let k = self.values.len();
        (0..k / 2)
            .map(|i| (self.values[i].powi(2) + self.values[k - 1 - i].powi(2) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn spectrum_of(b: &CMat) -> Result<Spectrum> {
    // Jacobi on G(B)^T: its right rotation holds the left vectors of G(B)
    let gt = realify_matrix(b).transpose();
    let svd = jacobi_svd(&gt)?;
    Ok(Spectrum {
        values: svd.singular_values,
        left_vectors: svd.v,
    })
}

pub fn singular_spectrum(ensemble: &SamplingEnsemble, x_ref: &CVec, policy: ZeroPhase) -> Result<Spectrum> {
    spectrum_of(&build_b(ensemble, x_ref, policy)?.b)
}

/// Singular values of a complex matrix via the real embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum repeats each value twice.
pub fn complex_singular_values(a: &CMat) -> Result<RVec> {
    let (r, c) = a.shape();
    let emb = RMat::from_fn(2 * r, 2 * c, |i, j| {
        let z = a[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let s = singular_values(&emb)?;
    Ok(RVec::from_fn(r.min(c), |k, _| s[2 * k]))
}

/// Relative threshold for "nonzero" singular values.
pub const NONZERO_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub n: usize,
    pub m: usize,
    pub delta1: f64,
    pub delta2: f64,
    pub sigma2: f64,
    pub beta_tilde: f64,
    pub t_max: f64,
    pub gamma_fit: Option<f64>,
    pub s_min_a: f64,
    pub s_max_a: f64,
    pub b_min: f64,
    /// Largest violation of the singular pairing identity.
    pub pairing_defect: f64,
    /// False when a standing assumption fails (rank deficiency, `sigma2`
    /// numerically 1, zero amplitudes).
    pub valid: bool,
    pub warnings: Vec<String>,
}

/// `1 / sqrt(1 + s_min^2)`, with `s_min` below the nonzero threshold taken
/// as 0. The flag is false in that rank-deficient case.
pub fn delta1_bound(s_min: f64, s_max: f64) -> (f64, bool) {
    let rank_ok = s_min > NONZERO_TOL * s_max;
    let s = if rank_ok { s_min } else { 0.0 };
    (1.0 / (1.0 + s * s).sqrt(), rank_ok)
}

/// `t_max = 2 (1 - beta^2) / (2 - beta^2)`.
pub fn t_max_from_beta2(beta2: f64) -> f64 {
    2.0 * (1.0 - beta2) / (2.0 - beta2)
}

pub fn contraction_constants(ensemble: &SamplingEnsemble, x_ref: &CVec, policy: ZeroPhase) -> Result<DiagnosticsReport> {
    let bm = build_b(ensemble, x_ref, policy)?;
    let spectrum = spectrum_of(&bm.b)?;
    let a = ensemble.to_dense();
    let s = complex_singular_values(&a)?;
    let s_max = s[0];
    let s_min = s[s.len() - 1];
    let mut warnings = Vec::new();
    let mut valid = true;

    let (delta1, rank_ok) = delta1_bound(s_min, s_max);
    if !rank_ok {
        valid = false;
        warnings.push("A is rank deficient; delta1 = 1".into());
    }

    // G(A Omega_y): scale column i of A by the i-th measurement phase
    let mut a_omega = a.clone();
    for (j, w) in bm.omega_y.iter().enumerate() {
        for i in 0..a.nrows() {
            a_omega[(i, j)] *= *w;
        }
    }
    let g = singular_values(&realify_matrix(&a_omega))?;
    let g_max = g[0];
    let g_min = g.iter().copied().filter(|&v| v > NONZERO_TOL * g_max).fold(f64::INFINITY, f64::min);
    let delta2 = if g_min.is_finite() { g_min / (1.0 + s_max * s_max) } else { 0.0 };

    let sigma2 = spectrum.sigma2();
    if sigma2 >= 1.0 - 1e-8 {
        valid = false;
        warnings.push(format!("sigma2 = {sigma2} is numerically 1"));
    }
    let beta2 = (sigma2 * sigma2 + (1.0 - sigma2 * sigma2) * delta1 * delta1).max(sigma2 * sigma2);
    let beta_tilde = beta2.sqrt();
    let t_max = t_max_from_beta2(beta2);

    let b_min = ensemble
        .forward(x_ref)
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    if b_min <= 0.0 {
        valid = false;
        warnings.push("some amplitude is zero".into());
    }

    Ok(DiagnosticsReport {
        n: ensemble.n(),
        m: ensemble.m(),
        delta1,
        delta2,
        sigma2,
        beta_tilde,
        t_max,
        gamma_fit: None,
        s_min_a: s_min,
        s_max_a: s_max,
        b_min,
        pairing_defect: spectrum.pairing_defect(),
        valid,
        warnings,
    })
}

impl DiagnosticsReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub const CSV_HEADER: [&'static str; 13] = [
        "n",
        "m",
        "delta1",
        "delta2",
        "sigma2",
        "beta_tilde",
        "t_max",
        "gamma_fit",
        "s_min_a",
        "s_max_a",
        "b_min",
        "pairing_defect",
        "valid",
    ];

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        let f = |v: f64| format!("{v:e}");
        w.write_record([
            self.n.to_string(),
            self.m.to_string(),
            f(self.delta1),
            f(self.delta2),
            f(self.sigma2),
            f(self.beta_tilde),
            f(self.t_max),
            self.gamma_fit.map(f).unwrap_or_default(),
            f(self.s_min_a),
            f(self.s_max_a),
            f(self.b_min),
            f(self.pairing_defect),
            self.valid.to_string(),
        ])?;
        w.flush()?;
        Ok(())
    }
}

/// Least-squares fit of `ln rel_err` against the iteration index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub gamma: f64,
    pub slope: f64,
    pub points: usize,
}

/// Records below this error are treated as exact and skipped.
pub const FIT_FLOOR: f64 = 1e-14;

/// Fit `rel_err ~ C gamma^k` over the tail half of the usable records.
pub fn fit_rate(trace: &Trace) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = trace
        .records()
        .iter()
        .filter_map(|r| r.rel_err.filter(|&e| e > FIT_FLOOR).map(|e| (r.iter as f64, e.ln())))
        .collect();
    if pts.len() < 10 {
        return Err(Error::Degenerate(format!("{} usable records, need 10", pts.len())));
    }
    let tail = &pts[pts.len() / 2..];
    let k = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / k;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = tail.iter().map(|p| (p.1 - my).powi(2)).sum();
    if syy == 0.0 {
        return Err(Error::Degenerate("constant error trace".into()));
    }
    let slope = sxy / sxx;
    Ok(RateFit {
        gamma: slope.exp(),
        slope,
        points: tail.len(),
    })
}

/// Fixed-point defect of the stacked DR point `(x + lambda, y + nu)` for
/// `g = 0` and the exact graph projection.
pub fn fixed_point_residual(state: &GpsState, projector: &GraphProjector<'_>, instance: &ProblemInstance) -> Result<f64> {
    stacked_fixed_point_residual(&state.dr_point(), projector, &instance.amplitudes, &PriorSpec::None, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rng::{gaussian_vector, rng_from_seed};
    use crate::model::{gen_gaussian, FieldKind};

    #[test]
    fn realify_examples() {
        let z = CVec::from_element(1, Complex64::new(1.0, 2.0));
        assert_eq!(realify(&z).as_slice(), &[1.0, 2.0]);
        let mut r = rng_from_seed(1);
        let z = gaussian_vector(&mut r, 3, FieldKind::Complex);
        let iz = z.map(|v| v * Complex64::i());
        let gz = realify(&z);
        let giz = realify(&iz);
        for k in 0..3 {
            assert_eq!(giz[k], -gz[k + 3]);
            assert_eq!(giz[k + 3], gz[k]);
        }
        assert_eq!(complexify(&gz).unwrap(), z);
    }

    #[test]
    fn realified_product_relation() {
        // G(B* u) = (G(B)^T G(u); G(B)^T G(-i u))
        let mut r = rng_from_seed(2);
        let bv = gaussian_vector(&mut r, 4 * 9, FieldKind::Complex);
        let b = CMat::from_iterator(4, 9, bv.iter().copied());
        let u = gaussian_vector(&mut r, 4, FieldKind::Complex);
        let lhs = realify(&(b.adjoint() * &u));
        let g = realify_matrix(&b);
        let top = g.transpose() * realify(&u);
        let bottom = g.transpose() * realify(&u.map(|v| v * -Complex64::i()));
        for k in 0..9 {
            assert!((lhs[k] - top[k]).abs() < 1e-12);
            assert!((lhs[k + 9] - bottom[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn b_is_a_coisometry() {
        let inst = gen_gaussian(4, 10, FieldKind::Complex, 3).unwrap();
        let bm = build_b(&inst.ensemble, inst.truth.as_ref().unwrap(), ZeroPhase::Reject).unwrap();
        assert!((&bm.b * bm.b.adjoint() - CMat::identity(4, 4)).camax() < 1e-10);
        assert!(bm.omega_x.iter().chain(bm.omega_y.iter()).all(|w| (w.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn scalar_b() {
        let ens = SamplingEnsemble::dense(CMat::identity(1, 1), FieldKind::Real).unwrap();
        let x = CVec::from_element(1, Complex64::new(1.0, 0.0));
        let bm = build_b(&ens, &x, ZeroPhase::Reject).unwrap();
        assert!((bm.l[(0, 0)].re - 2f64.sqrt()).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((bm.b[(0, 0)].re - h).abs() < 1e-15 && (bm.b[(0, 1)].re - h).abs() < 1e-15);
    }

    #[test]
    fn zero_entry_needs_fill_flag() {
        let inst = gen_gaussian(3, 9, FieldKind::Real, 4).unwrap();
        let mut x = inst.truth.clone().unwrap();
        x[1] = Complex64::new(0.0, 0.0);
        assert!(matches!(
            build_b(&inst.ensemble, &x, ZeroPhase::Reject),
            Err(Error::ZeroPhase { what: "x_ref", index: 1 })
        ));
        assert!(build_b(&inst.ensemble, &x, ZeroPhase::FillOne).is_ok());
    }

    #[test]
    fn real_instance_pairing() {
        // real data: G(B) = (B; 0), so the spectrum is n ones and n zeros
        let inst = gen_gaussian(6, 18, FieldKind::Real, 5).unwrap();
        let x = inst.truth.as_ref().unwrap();
        let bm = build_b(&inst.ensemble, x, ZeroPhase::Reject).unwrap();
        let sp = spectrum_of(&bm.b).unwrap();
        assert_eq!(sp.values.len(), 12);
        assert!(sp.pairing_defect() < 1e-8);
        let g = realify_matrix(&bm.b);
        let lx = bm.l.adjoint() * x;
        let lead = realify(&lx).normalize();
        let trail = realify(&lx.map(|v| v * -Complex64::i())).normalize();
        assert!(((g.transpose() * lead).norm() - 1.0).abs() < 1e-10);
        assert!((g.transpose() * trail).norm() < 1e-10);
    }

    #[test]
    fn pairing_and_extreme_vectors() {
        let inst = gen_gaussian(6, 18, FieldKind::Complex, 5).unwrap();
        let x = inst.truth.as_ref().unwrap();
        let bm = build_b(&inst.ensemble, x, ZeroPhase::Reject).unwrap();
        let sp = spectrum_of(&bm.b).unwrap();
        let k = sp.values.len();
        assert_eq!(k, 12);
        assert!((sp.values[0] - 1.0).abs() < 1e-8);
        assert!(sp.values[k - 1].abs() < 1e-8);
        assert!(sp.pairing_defect() < 1e-8);
        let lx = bm.l.adjoint() * x;
        let lead = realify(&lx).normalize();
        let trail = realify(&lx.map(|v| v * -Complex64::i())).normalize();
        let v1 = sp.left_vectors.column(0).into_owned();
        let vk = sp.left_vectors.column(k - 1).into_owned();
        assert!(1.0 - v1.dot(&lead).abs() < 1e-6);
        assert!(1.0 - vk.dot(&trail).abs() < 1e-6);
    }

    #[test]
    fn complex_singular_values_match_nalgebra() {
        let inst = gen_gaussian(4, 9, FieldKind::Complex, 6).unwrap();
        let a = inst.ensemble.dense_matrix().unwrap();
        let ours = complex_singular_values(a).unwrap();
        let mut theirs: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        assert_eq!(ours.len(), 4);
        for (x, y) in ours.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn t_max_arithmetic() {
        assert!((t_max_from_beta2(0.5) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn report_ranges_on_random_complex() {
        let inst = gen_gaussian(8, 32, FieldKind::Complex, 7).unwrap();
        let rep = contraction_constants(&inst.ensemble, inst.truth.as_ref().unwrap(), ZeroPhase::Reject).unwrap();
        assert!(rep.valid, "{:?}", rep.warnings);
        assert!(rep.delta1 > 0.0 && rep.delta1 < 1.0);
        assert!(rep.delta2 >= 0.0 && rep.delta2 < 1.0);
        assert!(rep.sigma2 >= 0.0 && rep.sigma2 < 1.0);
        assert!(rep.t_max > 0.0 && rep.t_max < 1.0);
        assert!(0.1 < rep.t_max);
    }

    #[test]
    fn rank_deficient_embedding_has_zero_singular_value() {
        let a = CMat::from_fn(2, 3, |_, j| Complex64::new(1.0 + j as f64, 0.5));
        let s = complex_singular_values(&a).unwrap();
        assert!(s[1] < 1e-10 * s[0]);
        assert_eq!(delta1_bound(s[1], s[0]), (1.0, false));
        let (d, ok) = delta1_bound(1.0, 2.0);
        assert!(ok && (d - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fit_rate_examples() {
        use crate::solvers::TraceRecord;
        let mut t = Trace::new();
        for k in 0..40 {
            t.push(TraceRecord { iter: k, rel_err: Some(0.5f64.powi(k as i32)), residual: 0.0, seconds: 0.0 })
                .unwrap();
        }
        assert!((fit_rate(&t).unwrap().gamma - 0.5).abs() < 1e-6);
        let mut c = Trace::new();
        for k in 0..20 {
            c.push(TraceRecord { iter: k, rel_err: Some(0.3), residual: 0.0, seconds: 0.0 }).unwrap();
        }
        assert!(matches!(fit_rate(&c), Err(Error::Degenerate(_))));
    }

    #[test]
    fn fixed_point_residual_at_truth_and_away() {
        let inst = gen_gaussian(5, 20, FieldKind::Complex, 8).unwrap();
        let p = GraphProjector::build(&inst.ensemble).unwrap();
        let s = GpsState::from_signal(&inst, inst.truth.clone().unwrap()).unwrap();
        assert!(fixed_point_residual(&s, &p, &inst).unwrap() < 1e-10);
        let far = GpsState::init(&inst, 3);
        assert!(fixed_point_residual(&far, &p, &inst).unwrap() > 0.0);
    }
}
