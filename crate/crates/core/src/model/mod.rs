//! Problem construction: sampling ensembles, instances, noise, priors and
//! error metrics.

mod fourier;
pub mod io;
pub mod rng;

pub use fourier::FourierOperator;

use nalgebra::SVD;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::{CMat, CVec, RVec};

use rng::{field_gaussian, gaussian_vector, real_gaussian_vector, rng_from_seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Real,
    Complex,
}

impl FieldKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Real => "real",
            FieldKind::Complex => "complex",
        }
    }
}

impl std::str::FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(FieldKind::Real),
            "complex" => Ok(FieldKind::Complex),
            other => Err(Error::Config(format!("unknown field `{other}`"))),
        }
    }
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Structural tag of a sampling matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Structure {
    Generic,
    /// `A A* = l I`.
    ScaledIsometric {
        l: f64,
    },
    /// 2D DFT on a `(pad*h) x (pad*w)` grid; implies `A A* = l I`.
    OversampledFourier {
        height: usize,
        width: usize,
        pad_factor: usize,
        l: f64,
    },
}

impl Structure {
    pub fn isometry_scale(&self) -> Option<f64> {
        match *self {
            Structure::Generic => None,
            Structure::ScaledIsometric { l } | Structure::OversampledFourier { l, .. } => Some(l),
        }
    }
}

#[derive(Clone, Debug)]
enum Operator {
    Dense(CMat),
    Fourier(FourierOperator),
}

/// The sampling matrix `A` (n x m, column `i` holds `a_i`) together with its
/// structure tag.
#[derive(Clone, Debug)]
pub struct SamplingEnsemble {
    op: Operator,
    structure: Structure,
    field: FieldKind,
}

/// Relative threshold below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Tolerance on `max |A A* - l I|` for scaled isometries.
pub const ISOMETRY_TOL: f64 = 1e-10;

impl SamplingEnsemble {
    /// Generic dense ensemble. Fails when `A` is not of full rank.
    pub fn dense(a: CMat, field: FieldKind) -> Result<Self> {
        validate_entries(&a, field)?;
        check_full_rank(&a)?;
        Ok(Self {
            op: Operator::Dense(a),
            structure: Structure::Generic,
            field,
        })
    }

    /// Dense ensemble known to satisfy `A A* = l I`.
    pub fn scaled_isometric(a: CMat, l: f64, field: FieldKind) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidParameter(format!("isometry scale {l}")));
        }
        validate_entries(&a, field)?;
        let gram = &a * a.adjoint();
        let mut worst = 0.0f64;
        for (i, j) in (0..a.nrows()).flat_map(|i| (0..a.nrows()).map(move |j| (i, j))) {
            let target = if i == j { l } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
        if worst >= ISOMETRY_TOL {
            return Err(Error::InvalidParameter(format!(
                "matrix is not a scaled isometry (max |AA* - lI| = {worst:e})"
            )));
        }
        Ok(Self {
            op: Operator::Dense(a),
            structure: Structure::ScaledIsometric { l },
            field,
        })
    }

    /// Oversampled 2D Fourier ensemble with the unnormalised DFT.
    pub fn oversampled_fourier(height: usize, width: usize, pad_factor: usize) -> Result<Self> {
        Self::scaled_fourier(height, width, pad_factor, 1.0)
    }

    /// Oversampled Fourier ensemble with `A* = scale * DFT2`.
    pub fn scaled_fourier(
        height: usize,
        width: usize,
        pad_factor: usize,
        scale: f64,
    ) -> Result<Self> {
        let op = FourierOperator::new(height, width, pad_factor, scale)?;
        let structure = Structure::OversampledFourier {
            height,
            width,
            pad_factor,
            l: op.isometry_scale(),
        };
        Ok(Self {
            op: Operator::Fourier(op),
            structure,
            field: FieldKind::Complex,
        })
    }

    /// Signal dimension.
    pub fn n(&self) -> usize {
        match &self.op {
            Operator::Dense(a) => a.nrows(),
            Operator::Fourier(f) => f.len(),
        }
    }

    /// Number of measurements.
    pub fn m(&self) -> usize {
        match &self.op {
            Operator::Dense(a) => a.ncols(),
            Operator::Fourier(f) => f.len(),
        }
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn field(&self) -> FieldKind {
        self.field
    }

    pub fn isometry_scale(&self) -> Option<f64> {
        self.structure.isometry_scale()
    }

    pub fn dense_matrix(&self) -> Option<&CMat> {
        match &self.op {
            Operator::Dense(a) => Some(a),
            Operator::Fourier(_) => None,
        }
    }

    pub fn fourier(&self) -> Option<&FourierOperator> {
        match &self.op {
            Operator::Dense(_) => None,
            Operator::Fourier(f) => Some(f),
        }
    }

    /// Dense copy of `A`, materialising operator-form ensembles.
    pub fn to_dense(&self) -> CMat {
        match &self.op {
            Operator::Dense(a) => a.clone(),
            Operator::Fourier(f) => f.to_dense(),
        }
    }

    /// `A* x` (signal space to measurement space).
    pub fn forward(&self, x: &CVec) -> CVec {
        debug_assert_eq!(x.len(), self.n());
        match &self.op {
            Operator::Dense(a) => a.ad_mul(x),
            Operator::Fourier(f) => f.forward(x),
        }
    }

    /// `A y` (measurement space to signal space).
    pub fn backward(&self, y: &CVec) -> CVec {
        debug_assert_eq!(y.len(), self.m());
        match &self.op {
            Operator::Dense(a) => a * y,
            Operator::Fourier(f) => f.backward(y),
        }
    }
}

fn validate_entries(a: &CMat, field: FieldKind) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::InvalidParameter("empty sampling matrix".into()));
    }
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidParameter("non-finite matrix entry".into()));
    }
    if field == FieldKind::Real && a.iter().any(|z| z.im != 0.0) {
        return Err(Error::InvalidParameter(
            "real ensemble has a nonzero imaginary part".into(),
        ));
    }
    Ok(())
}

fn check_full_rank(a: &CMat) -> Result<()> {
    let svd = SVD::new(a.clone(), false, false);
    let s = &svd.singular_values;
    let max = s.max();
    let min = s.min();
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    if ratio > RANK_TOL {
        Ok(())
    } else {
        Err(Error::RankDeficient { ratio })
    }
}

/// A phase retrieval instance: ensemble, optional ground truth and the
/// (possibly noisy) amplitude data.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub ensemble: SamplingEnsemble,
    pub truth: Option<CVec>,
    pub amplitudes: RVec,
    pub snr_db: Option<f64>,
    pub seed: u64,
    /// Noisy amplitudes that went negative and were clamped to zero.
    pub clamped: usize,
}

impl ProblemInstance {
    pub fn new(
        ensemble: SamplingEnsemble,
        truth: Option<CVec>,
        amplitudes: RVec,
        seed: u64,
    ) -> Result<Self> {
        check_len(ensemble.m(), amplitudes.len())?;
        if let Some(t) = &truth {
            check_len(ensemble.n(), t.len())?;
        }
        if amplitudes.iter().any(|&b| !(b >= 0.0 && b.is_finite())) {
            return Err(Error::InvalidParameter(
                "amplitudes must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            ensemble,
            truth,
            amplitudes,
            snr_db: None,
            seed,
            clamped: 0,
        })
    }

    /// Clean instance with `b = |A* truth|`.
    pub fn from_truth(ensemble: SamplingEnsemble, truth: CVec, seed: u64) -> Result<Self> {
        let b = measure(&ensemble, &truth)?;
        Self::new(ensemble, Some(truth), b, seed)
    }

    pub fn n(&self) -> usize {
        self.ensemble.n()
    }

    pub fn m(&self) -> usize {
        self.ensemble.m()
    }

    pub fn b_min(&self) -> f64 {
        self.amplitudes
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// True when `b_min > 0`, the standing assumption of the local theory.
    pub fn has_positive_amplitudes(&self) -> bool {
        self.b_min() > 0.0
    }

    pub fn with_noise(self, snr_db: f64, seed: u64) -> Result<Self> {
        add_noise(self, snr_db, seed)
    }
}

/// Real (`N(0,1)`) or complex (`CN(0,1)`) Gaussian instance.
pub fn gen_gaussian(n: usize, m: usize, field: FieldKind, seed: u64) -> Result<ProblemInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be >= 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let a = CMat::from_fn(n, m, |_, _| field_gaussian(&mut rng, field));
    let truth = gaussian_vector(&mut rng, n, field);
    let ensemble = SamplingEnsemble::dense(a, field)?;
    ProblemInstance::from_truth(ensemble, truth, seed)
}

/// Real Gaussian instance whose truth is nonnegative and `s`-sparse inside
/// the leading `support_len` coordinates. Nonzero values are `|N(0,1)|`
/// shifted by `floor` so they stay away from zero.
pub fn gen_sparse(
    n: usize,
    m: usize,
    s: usize,
    support_len: usize,
    floor: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be >= 1".into()));
    }
    if support_len > n || s > support_len {
        return Err(Error::InvalidParameter(format!(
            "sparsity {s} must fit in support {support_len} <= n = {n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let a = CMat::from_fn(n, m, |_, _| field_gaussian(&mut rng, FieldKind::Real));
    let mut idx: Vec<usize> = (0..support_len).collect();
    // partial Fisher-Yates
    for i in 0..s {
        let j = rng.random_range(i..support_len);
        idx.swap(i, j);
    }
    let mut truth = CVec::zeros(n);
    for &k in &idx[..s] {
        truth[k] = Complex64::new(floor + rng::gaussian(&mut rng).abs(), 0.0);
    }
    let ensemble = SamplingEnsemble::dense(a, FieldKind::Real)?;
    ProblemInstance::from_truth(ensemble, truth, seed)
}

/// Add Gaussian amplitude noise at the given SNR (`20 log10(|b| / |e|)`).
///
/// `snr_db = +inf` returns the instance unchanged. Negative noisy amplitudes
/// are clamped to zero and counted in [`ProblemInstance::clamped`].
pub fn add_noise(mut instance: ProblemInstance, snr_db: f64, seed: u64) -> Result<ProblemInstance> {
    if snr_db == f64::INFINITY {
        instance.snr_db = Some(f64::INFINITY);
        return Ok(instance);
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter(format!("snr_db = {snr_db}")));
    }
    let mut rng = rng_from_seed(seed);
    let raw = real_gaussian_vector(&mut rng, instance.m());
    let b = &instance.amplitudes;
    let target = b.norm() * 10f64.powf(-snr_db / 20.0);
    let raw_norm = raw.norm();
    let noise = if raw_norm > 0.0 {
        raw * (target / raw_norm)
    } else {
        raw
    };
    let mut clamped = 0;
    let noisy = RVec::from_fn(b.len(), |i, _| {
        let v = b[i] + noise[i];
        if v < 0.0 {
            clamped += 1;
            0.0
        } else {
            v
        }
    });
    instance.amplitudes = noisy;
    instance.snr_db = Some(snr_db);
    instance.clamped = clamped;
    Ok(instance)
}

/// `|A* x|` elementwise.
pub fn measure(ensemble: &SamplingEnsemble, x: &CVec) -> Result<RVec> {
    check_len(ensemble.n(), x.len())?;
    Ok(ensemble.forward(x).map(|z| z.norm()))
}

/// Phase-aligned relative error `min_{|a|=1} |x - a truth| / |truth|`.
pub fn rel_err(x: &CVec, truth: &CVec) -> Result<f64> {
    check_len(truth.len(), x.len())?;
    let tn = truth.norm();
    if tn == 0.0 {
        return Err(Error::Degenerate("zero truth vector".into()));
    }
    let ip = x.dotc(truth);
    let alpha = if ip.norm() > 0.0 {
        ip / ip.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let diff = x
        .iter()
        .zip(truth.iter())
        .map(|(a, t)| (a * alpha - t).norm_sqr())
        .sum::<f64>();
    Ok(diff.sqrt() / tn)
}

/// `| |A* x| - b | / |b|`, or `| |A* x| |` when `b = 0`.
pub fn residual(ensemble: &SamplingEnsemble, x: &CVec, b: &RVec) -> Result<f64> {
    check_len(ensemble.m(), b.len())?;
    let ax = measure(ensemble, x)?;
    let bn = b.norm();
    if bn == 0.0 {
        Ok(ax.norm())
    } else {
        Ok((ax - b).norm() / bn)
    }
}

/// Prior information on the signal.
#[derive(Clone, Debug, PartialEq)]
pub enum PriorSpec {
    None,
    Indicator {
        support: Vec<bool>,
        real_valued: bool,
        nonnegative: bool,
    },
    /// `max(Re x - p, 0)` on the support.
    SoftThreshold {
        p: f64,
        support: Vec<bool>,
    },
    /// Keep the `s` largest-modulus entries on the support.
    HardThreshold {
        s: usize,
        support: Vec<bool>,
    },
}

impl PriorSpec {
    /// Check parameters against a signal length.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            PriorSpec::None => Ok(()),
            PriorSpec::Indicator { support, .. } => check_len(n, support.len()),
            PriorSpec::SoftThreshold { p, support } => {
                check_len(n, support.len())?;
                if !(p.is_finite() && *p > 0.0) {
                    return Err(Error::InvalidParameter(format!("soft threshold p = {p}")));
                }
                Ok(())
            }
            PriorSpec::HardThreshold { s, support } => {
                check_len(n, support.len())?;
                let size = support.iter().filter(|&&b| b).count();
                if *s > size {
                    return Err(Error::InvalidParameter(format!(
                        "hard threshold s = {s} exceeds support size {size}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, PriorSpec::None)
    }

    pub fn support(&self) -> Option<&[bool]> {
        match self {
            PriorSpec::None => None,
            PriorSpec::Indicator { support, .. }
            | PriorSpec::SoftThreshold { support, .. }
            | PriorSpec::HardThreshold { support, .. } => Some(support),
        }
    }
}

/// Support mask covering the leading `len` coordinates of an `n`-vector.
pub fn leading_support(n: usize, len: usize) -> Vec<bool> {
    (0..n).map(|i| i < len).collect()
}

/// Nonnegative piecewise-constant `h x w` image built from `blocks` random
/// rectangles, row-major.
pub fn piecewise_constant_phantom(h: usize, w: usize, blocks: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let mut img = vec![0.0; h * w];
    for _ in 0..blocks {
        let r0 = rng.random_range(0..h);
        let c0 = rng.random_range(0..w);
        let r1 = rng.random_range(r0 + 1..=h);
        let c1 = rng.random_range(c0 + 1..=w);
        let value = rng.random_range(0.2..1.0);
        for r in r0..r1 {
            for c in c0..c1 {
                img[r * w + c] += value;
            }
        }
    }
    img
}

/// Embed an `h x w` image into the top-left corner of the padded grid.
pub fn embed_image(image: &[f64], h: usize, w: usize, op: &FourierOperator) -> Result<CVec> {
    check_len(h * w, image.len())?;
    if h != op.height() || w != op.width() {
        return Err(Error::DimensionMismatch {
            expected: op.height() * op.width(),
            found: h * w,
        });
    }
    let gw = op.grid_width();
    let mut x = CVec::zeros(op.len());
    for r in 0..h {
        for c in 0..w {
            x[r * gw + c] = Complex64::new(image[r * w + c], 0.0);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_instance_amplitude_is_exact_modulus() {
        let inst = gen_gaussian(1, 1, FieldKind::Real, 7).unwrap();
        let a = inst.ensemble.dense_matrix().unwrap()[(0, 0)];
        let x = inst.truth.as_ref().unwrap()[0];
        assert_eq!(inst.amplitudes[0], (a.conj() * x).norm());
    }

    #[test]
    fn complex_entries_have_unit_second_moment() {
        let inst = gen_gaussian(1, 10_000, FieldKind::Complex, 11).unwrap();
        let a = inst.ensemble.dense_matrix().unwrap();
        let mean = a.iter().map(|z| z.norm_sqr()).sum::<f64>() / 10_000.0;
        assert!((mean - 1.0).abs() < 0.05, "mean |a|^2 = {mean}");
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_gaussian(5, 12, FieldKind::Complex, 3).unwrap();
        let b = gen_gaussian(5, 12, FieldKind::Complex, 3).unwrap();
        assert_eq!(a.ensemble.dense_matrix(), b.ensemble.dense_matrix());
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.amplitudes, b.amplitudes);
    }

    #[test]
    fn real_instances_have_zero_imaginary_parts() {
        let inst = gen_gaussian(4, 9, FieldKind::Real, 1).unwrap();
        assert!(inst
            .ensemble
            .dense_matrix()
            .unwrap()
            .iter()
            .all(|z| z.im == 0.0));
        assert!(inst.truth.unwrap().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn rank_deficient_matrix_is_rejected() {
        let a = CMat::from_fn(2, 3, |i, j| c((j + 1) as f64 * (i + 1) as f64, 0.0));
        assert!(matches!(
            SamplingEnsemble::dense(a, FieldKind::Real),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn real_field_with_imaginary_entry_is_rejected() {
        let a = CMat::from_element(1, 1, c(1.0, 0.5));
        assert!(SamplingEnsemble::dense(a, FieldKind::Real).is_err());
    }

    #[test]
    fn fourier_isometry_small_grid() {
        let ens = SamplingEnsemble::oversampled_fourier(2, 2, 2).unwrap();
        let l = ens.isometry_scale().unwrap();
        assert_eq!(l, 16.0);
        let mut r = rng_from_seed(5);
        let x = gaussian_vector(&mut r, ens.n(), FieldKind::Complex);
        let back = ens.backward(&ens.forward(&x));
        for (u, v) in back.iter().zip(x.iter()) {
            assert!((u - v * l).norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_of_constant_image_is_dc_only() {
        let ens = SamplingEnsemble::oversampled_fourier(2, 3, 2).unwrap();
        let x = CVec::from_element(ens.n(), c(1.5, 0.0));
        let y = ens.forward(&x);
        assert!((y[0].re - 1.5 * ens.n() as f64).abs() < 1e-12);
        for k in 1..y.len() {
            assert!(y[k].norm() < 1e-12, "bin {k}: {}", y[k]);
        }
    }

    #[test]
    fn fourier_parseval_matches_direct_dft() {
        let ens = SamplingEnsemble::oversampled_fourier(2, 3, 2).unwrap();
        let f = ens.fourier().unwrap();
        let (gh, gw) = (f.grid_height(), f.grid_width());
        let mut r = rng_from_seed(9);
        let x = gaussian_vector(&mut r, ens.n(), FieldKind::Complex);
        // direct O(N^2) DFT
        let mut direct = CVec::zeros(ens.n());
        for (u, v) in (0..gh).flat_map(|u| (0..gw).map(move |v| (u, v))) {
            let mut acc = c(0.0, 0.0);
            for (p, q) in (0..gh).flat_map(|p| (0..gw).map(move |q| (p, q))) {
                let ang = -2.0
                    * std::f64::consts::PI
                    * ((u * p) as f64 / gh as f64 + (v * q) as f64 / gw as f64);
                acc += x[p * gw + q] * Complex64::from_polar(1.0, ang);
            }
            direct[u * gw + v] = acc;
        }
        let fast = ens.forward(&x);
        assert!((&fast - &direct).norm() < 1e-10 * direct.norm());
        let l = ens.isometry_scale().unwrap();
        assert!(
            (direct.norm_squared() - l * x.norm_squared()).abs() < 1e-10 * direct.norm_squared()
        );
    }

    #[test]
    fn fourier_dense_materialisation_agrees() {
        let ens = SamplingEnsemble::scaled_fourier(2, 2, 2, 0.25).unwrap();
        let a = ens.to_dense();
        let dense = SamplingEnsemble::scaled_isometric(
            a,
            ens.isometry_scale().unwrap(),
            FieldKind::Complex,
        )
        .unwrap();
        let mut r = rng_from_seed(2);
        let x = gaussian_vector(&mut r, ens.n(), FieldKind::Complex);
        assert!((ens.forward(&x) - dense.forward(&x)).norm() < 1e-12);
        assert!((ens.backward(&x) - dense.backward(&x)).norm() < 1e-12);
    }

    #[test]
    fn noise_passthrough_and_scaling() {
        let inst = gen_gaussian(8, 30, FieldKind::Real, 4).unwrap();
        let b = inst.amplitudes.clone();
        let same = add_noise(inst.clone(), f64::INFINITY, 1).unwrap();
        assert_eq!(same.amplitudes, b);

        // reproduce the unclamped noise from the same seed
        let mut r = rng_from_seed(99);
        let raw = real_gaussian_vector(&mut r, 30);
        let eps = &raw * (b.norm() * 0.1 / raw.norm());
        assert!(((eps.norm() / b.norm()) - 0.1).abs() < 1e-14);
        let noisy = add_noise(inst, 20.0, 99).unwrap();
        for i in 0..30 {
            let expect = (b[i] + eps[i]).max(0.0);
            assert_eq!(noisy.amplitudes[i], expect);
        }
    }

    #[test]
    fn noise_rejects_non_finite_snr() {
        let inst = gen_gaussian(2, 4, FieldKind::Real, 4).unwrap();
        assert!(add_noise(inst.clone(), f64::NAN, 1).is_err());
        assert!(add_noise(inst, f64::NEG_INFINITY, 1).is_err());
    }

    #[test]
    fn low_snr_on_small_amplitudes_clamps() {
        let a = CMat::identity(20, 20);
        let ens = SamplingEnsemble::dense(a, FieldKind::Real).unwrap();
        let b = RVec::from_element(20, 0.01);
        let inst = ProblemInstance::new(ens, None, b, 0).unwrap();
        let hits = (0..100)
            .filter(|&s| add_noise(inst.clone(), 0.0, s).unwrap().clamped > 0)
            .count();
        assert!(hits > 90, "clamped in {hits}/100 seeds");
    }

    #[test]
    fn noise_norm_decreases_with_snr() {
        let inst = gen_gaussian(6, 20, FieldKind::Complex, 8).unwrap();
        let b = inst.amplitudes.clone();
        let e1 = (add_noise(inst.clone(), 30.0, 5).unwrap().amplitudes - &b).norm();
        let e2 = (add_noise(inst, 10.0, 5).unwrap().amplitudes - &b).norm();
        assert!(e1 < e2);
    }

    #[test]
    fn measure_examples() {
        let ens = SamplingEnsemble::dense(CMat::identity(1, 1), FieldKind::Complex).unwrap();
        let v = measure(&ens, &CVec::from_element(1, c(3.0, 4.0))).unwrap();
        assert_eq!(v[0], 5.0);
        assert_eq!(measure(&ens, &CVec::zeros(1)).unwrap()[0], 0.0);
        assert!(measure(&ens, &CVec::zeros(2)).is_err());

        let inst = gen_gaussian(7, 21, FieldKind::Complex, 12).unwrap();
        let again = measure(&inst.ensemble, inst.truth.as_ref().unwrap()).unwrap();
        assert!((again - &inst.amplitudes).amax() < 1e-12);
    }

    #[test]
    fn rel_err_examples() {
        let mut r = rng_from_seed(1);
        let t = gaussian_vector(&mut r, 6, FieldKind::Complex);
        assert_eq!(rel_err(&t, &t).unwrap(), 0.0);
        let rotated = &t * Complex64::from_polar(1.0, 1.234);
        assert!(rel_err(&rotated, &t).unwrap() < 1e-14);

        let t = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let x = CVec::from_vec(vec![c(0.0, 0.0), c(0.0, 1.0)]);
        assert!((rel_err(&x, &t).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(rel_err(&x, &CVec::zeros(2)).is_err());
    }

    #[test]
    fn residual_examples() {
        let inst = gen_gaussian(5, 15, FieldKind::Real, 2).unwrap();
        let t = inst.truth.clone().unwrap();
        assert!(residual(&inst.ensemble, &t, &inst.amplitudes).unwrap() < 1e-12);
        assert_eq!(
            residual(&inst.ensemble, &CVec::zeros(5), &inst.amplitudes).unwrap(),
            1.0
        );

        let ens = SamplingEnsemble::dense(CMat::identity(3, 3), FieldKind::Complex).unwrap();
        let t = CVec::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)]);
        let b = t.map(|z| z.norm());
        let r = residual(&ens, &(&t * c(2.0, 0.0)), &b).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn b_min_flags_zero_amplitudes() {
        let ens = SamplingEnsemble::dense(CMat::identity(2, 2), FieldKind::Real).unwrap();
        let inst = ProblemInstance::new(ens, None, RVec::from_vec(vec![0.0, 1.0]), 0).unwrap();
        assert_eq!(inst.b_min(), 0.0);
        assert!(!inst.has_positive_amplitudes());
    }

    #[test]
    fn hard_threshold_requires_room_in_support() {
        let p = PriorSpec::HardThreshold {
            s: 3,
            support: leading_support(5, 2),
        };
        assert!(p.validate(5).is_err());
        let p = PriorSpec::HardThreshold {
            s: 2,
            support: leading_support(5, 2),
        };
        assert!(p.validate(5).is_ok());
        assert!(p.validate(4).is_err());
    }

    #[test]
    fn sparse_instance_layout() {
        let inst = gen_sparse(20, 20, 3, 10, 0.5, 4).unwrap();
        let t = inst.truth.unwrap();
        let nz: Vec<usize> = (0..20).filter(|&i| t[i].norm() > 0.0).collect();
        assert_eq!(nz.len(), 3);
        assert!(nz
            .iter()
            .all(|&i| i < 10 && t[i].re >= 0.5 && t[i].im == 0.0));
    }
}
