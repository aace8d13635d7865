//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Every subinterval carries a 15-point Kronrod estimate and an error estimate
//! derived from the embedded 7-point Gauss rule. The interval with the largest
//! error is bisected until the summed error drops below the requested
//! tolerance or the subdivision budget runs out.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::sum::NeumaierSum;
use crate::error::{Error, Result};

/// Accuracy and budget knobs for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Target relative error of the returned integral.
    pub rel_tol: f64,
    /// Absolute error floor; only matters for integrals that are (nearly) zero.
    pub abs_tol: f64,
    /// Maximum number of live subintervals.
    pub max_subdivisions: usize,
    /// Probability mass discarded when an infinite upper limit is truncated at a quantile.
    pub tail_mass: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-15,
            max_subdivisions: 10_000,
            tail_mass: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.tail_mass > 0.0 && self.tail_mass < 1.0) {
            return Err(Error::Config(format!(
                "quadrature needs rel_tol > 0 and 0 < tail_mass < 1, got {self:?}"
            )));
        }
        if self.max_subdivisions == 0 || !(self.abs_tol >= 0.0) {
            return Err(Error::Config(format!("invalid quadrature budget {self:?}")));
        }
        Ok(())
    }
}

// Kronrod abscissae (positive half, descending) and weights; odd indices are Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties resolved by position for determinism.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);

    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut abs_kronrod = kronrod.abs();
    let mut values = [(0.0, 0.0); 7];

    for (i, slot) in values.iter_mut().enumerate() {
        let dx = half * XGK[i];
        let left = f(center - dx);
        let right = f(center + dx);
        *slot = (left, right);
        kronrod += WGK[i] * (left + right);
        abs_kronrod += WGK[i] * (left.abs() + right.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (left + right);
        }
    }

    // Mean absolute deviation of f from its Kronrod mean, as in QUADPACK's qk15.
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (f_center - mean).abs();
    for (i, (left, right)) in values.iter().enumerate() {
        asc += WGK[i] * ((left - mean).abs() + (right - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_kronrod * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Segment { lo, hi, value, error }
}

/// Integrates `f` over the finite interval `[lo, hi]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    integrate_with_breaks(f, lo, hi, &[], cfg)
}

/// Like [`integrate`], but starts from a partition at the given interior
/// points. Points outside `(lo, hi)` are ignored. Kinks and jumps of the
/// integrand should be listed here.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Config(format!(
            "integration limits must be finite, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        return integrate_with_breaks(f, hi, lo, breaks, cfg).map(|v| -v);
    }

    let mut points: Vec<f64> = std::iter::once(lo)
        .chain(breaks.iter().copied().filter(|&b| b > lo && b < hi))
        .chain(std::iter::once(hi))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap = BinaryHeap::with_capacity(points.len() + 64);
    let mut total = 0.0;
    let mut total_error = 0.0;
    for pair in points.windows(2) {
        let seg = gauss_kronrod(&f, pair[0], pair[1]);
        total += seg.value;
        total_error += seg.error;
        heap.push(seg);
    }

    let tolerance = |total: f64| cfg.abs_tol.max(cfg.rel_tol * total.abs());
    let mut resummed = false;

    loop {
        if total_error <= tolerance(total) {
            break;
        }
        if heap.len() >= cfg.max_subdivisions {
            return Err(failure(cfg, total, total_error, heap.len()));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // The worst segment cannot be split further in floating point.
            heap.push(worst);
            if resummed {
                return Err(failure(cfg, total, total_error, heap.len()));
            }
            resummed = true;
            (total, total_error) = resum(&heap);
            continue;
        }
        let left = gauss_kronrod(&f, worst.lo, mid);
        let right = gauss_kronrod(&f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if total_error <= tolerance(total) {
            // Guard against drift in the running sums before accepting.
            (total, total_error) = resum(&heap);
        }
    }

    Ok(resum(&heap).0)
}

fn resum(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut segments: Vec<&Segment> = heap.iter().collect();
    segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut value = NeumaierSum::default();
    let mut error = NeumaierSum::default();
    for seg in segments {
        value.add(seg.value);
        error.add(seg.error);
    }
    (value.total(), error.total())
}

fn failure(cfg: &QuadratureConfig, total: f64, total_error: f64, subdivisions: usize) -> Error {
    Error::QuadratureFailure {
        tolerance: cfg.abs_tol.max(cfg.rel_tol * total.abs()),
        error_estimate: total_error,
        subdivisions,
    }
}
