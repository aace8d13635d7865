//! Processing-time distributions.
//!
//! A [`Distribution`] is a validated, immutable processing-time law. Continuous
//! kinds expose a density; the atomic kinds (deterministic and finite
//! discrete) only expose a CDF and their atoms. `ShapeUniform` and
//! `Translated` are built from a [`BaseDensity`] taken from a small built-in
//! catalog of mean-one densities on `[0, inf)`.
//!
//! JSON encoding (used inside instance files):
//!
//! ```json
//! {"type":"exponential","rate":2.0}
//! {"type":"finite","atoms":[[0,0.99],[10000,0.01]]}
//! {"type":"uniform","lo":0,"hi":2}
//! {"type":"shape_uniform","base":"exp1","rate":3.0}
//! {"type":"translated","base":"uniform01x2","shift":1.5}
//! {"type":"deterministic","value":0.5}
//! ```

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total probability of a finite discrete law.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Grid resolution used by [`Distribution::is_symmetric`].
pub const SYMMETRY_GRID: usize = 2000;

/// Named mean-one densities on `[0, inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseDensity {
    /// `g(x) = e^{-x}`.
    #[serde(rename = "exp1")]
    Exp1,
    /// Erlang with shape 2 and rate 2: `g(x) = 4x e^{-2x}`.
    #[serde(rename = "erlang2")]
    Erlang2,
    /// Uniform on `[0, 2]`.
    #[serde(rename = "uniform01x2")]
    Uniform02,
    /// Symmetric triangle on `[0, 2]` peaking at 1.
    #[serde(rename = "tri02")]
    Tri02,
    /// Decreasing ramp on `[0, 3]`: `g(x) = 2(3 - x)/9`.
    #[serde(rename = "ramp03")]
    Ramp03,
}

impl BaseDensity {
    pub const ALL: [BaseDensity; 5] = [
        BaseDensity::Exp1,
        BaseDensity::Erlang2,
        BaseDensity::Uniform02,
        BaseDensity::Tri02,
        BaseDensity::Ramp03,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseDensity::Exp1 => "exp1",
            BaseDensity::Erlang2 => "erlang2",
            BaseDensity::Uniform02 => "uniform01x2",
            BaseDensity::Tri02 => "tri02",
            BaseDensity::Ramp03 => "ramp03",
        }
    }

    pub fn mean(self) -> f64 {
        1.0
    }

    pub fn support_hi(self) -> f64 {
        match self {
            BaseDensity::Exp1 | BaseDensity::Erlang2 => f64::INFINITY,
            BaseDensity::Uniform02 | BaseDensity::Tri02 => 2.0,
            BaseDensity::Ramp03 => 3.0,
        }
    }

    /// Symmetric about the mean (by construction, not numerically).
    pub fn is_symmetric_shape(self) -> bool {
        matches!(self, BaseDensity::Uniform02 | BaseDensity::Tri02)
    }

    pub fn pdf(self, x: f64) -> f64 {
        if x < 0.0 || x > self.support_hi() {
            return 0.0;
        }
        match self {
            BaseDensity::Exp1 => (-x).exp(),
            BaseDensity::Erlang2 => 4.0 * x * (-2.0 * x).exp(),
            BaseDensity::Uniform02 => 0.5,
            BaseDensity::Tri02 => {
                if x <= 1.0 {
                    x
                } else {
                    2.0 - x
                }
            }
            BaseDensity::Ramp03 => 2.0 * (3.0 - x) / 9.0,
        }
    }

    pub fn cdf(self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.support_hi() {
            return 1.0;
        }
        match self {
            BaseDensity::Exp1 => -(-x).exp_m1(),
            BaseDensity::Erlang2 => -(-2.0 * x).exp_m1() - 2.0 * x * (-2.0 * x).exp(),
            BaseDensity::Uniform02 => 0.5 * x,
            BaseDensity::Tri02 => {
                if x <= 1.0 {
                    0.5 * x * x
                } else {
                    1.0 - 0.5 * (2.0 - x) * (2.0 - x)
                }
            }
            BaseDensity::Ramp03 => 1.0 - (3.0 - x) * (3.0 - x) / 9.0,
        }
    }

    pub fn quantile(self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return self.support_hi();
        }
        match self {
            BaseDensity::Exp1 => -(-u).ln_1p(),
            BaseDensity::Erlang2 => bisect_quantile(|x| self.cdf(x), u),
            BaseDensity::Uniform02 => 2.0 * u,
            BaseDensity::Tri02 => {
                if u <= 0.5 {
                    (2.0 * u).sqrt()
                } else {
                    2.0 - (2.0 * (1.0 - u)).sqrt()
                }
            }
            BaseDensity::Ramp03 => 3.0 - 3.0 * (1.0 - u).sqrt(),
        }
    }

    /// Points where the density is not smooth (support edges, kinks).
    pub fn breakpoints(self) -> &'static [f64] {
        match self {
            BaseDensity::Exp1 | BaseDensity::Erlang2 => &[0.0],
            BaseDensity::Uniform02 => &[0.0, 2.0],
            BaseDensity::Tri02 => &[0.0, 1.0, 2.0],
            BaseDensity::Ramp03 => &[0.0, 3.0],
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            BaseDensity::Exp1 => -(-rng.random::<f64>()).ln_1p(),
            BaseDensity::Erlang2 => {
                let a = -(-rng.random::<f64>()).ln_1p();
                let b = -(-rng.random::<f64>()).ln_1p();
                0.5 * (a + b)
            }
            BaseDensity::Uniform02 => 2.0 * rng.random::<f64>(),
            BaseDensity::Tri02 => rng.random::<f64>() + rng.random::<f64>(),
            BaseDensity::Ramp03 => self.quantile(rng.random::<f64>()),
        }
    }
}

impl fmt::Display for BaseDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseDensity::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = BaseDensity::ALL.iter().map(|b| b.name()).collect();
                Error::InvalidDistribution(format!(
                    "unknown base density {s:?} (known: {})",
                    known.join(", ")
                ))
            })
    }
}

fn bisect_quantile(cdf: impl Fn(f64) -> f64, u: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while cdf(hi) < u && hi < 1e6 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The raw (unvalidated) parameterization of a distribution; also its JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DistKind {
    Deterministic {
        value: f64,
    },
    #[serde(rename = "finite")]
    FiniteDiscrete {
        atoms: Vec<(f64, f64)>,
    },
    Exponential {
        rate: f64,
    },
    #[serde(rename = "uniform")]
    UniformInterval {
        lo: f64,
        hi: f64,
    },
    ShapeUniform {
        base: BaseDensity,
        rate: f64,
    },
    Translated {
        base: BaseDensity,
        shift: f64,
    },
}

/// A validated processing-time law with nonnegative support and finite positive mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistKind", into = "DistKind")]
pub struct Distribution {
    kind: DistKind,
    mean: f64,
    /// `(value, probability)` sorted by value; empty for continuous kinds.
    atoms: Vec<(f64, f64)>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidDistribution(msg.into()))
}

impl TryFrom<DistKind> for Distribution {
    type Error = Error;

    fn try_from(kind: DistKind) -> Result<Self> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let (mean, atoms) = match &kind {
            DistKind::Deterministic { value } => {
                if !(value.is_finite() && *value > 0.0) {
                    return invalid(format!("deterministic value must be finite and > 0, got {value}"));
                }
                (*value, vec![(*value, 1.0)])
            }
            DistKind::FiniteDiscrete { atoms } => {
                if atoms.is_empty() {
                    return invalid("finite distribution needs at least one atom");
                }
                let mut sorted = atoms.clone();
                for &(v, p) in &sorted {
                    if !finite_nonneg(v) {
                        return invalid(format!("atom value must be finite and >= 0, got {v}"));
                    }
                    if !(p.is_finite() && p > 0.0 && p <= 1.0) {
                        return invalid(format!("atom probability must lie in (0, 1], got {p}"));
                    }
                }
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
                if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
                    return invalid("atom values must be distinct");
                }
                let total: f64 = sorted.iter().map(|a| a.1).sum();
                if (total - 1.0).abs() > PROB_SUM_TOL {
                    return invalid(format!("atom probabilities sum to {total}, expected 1"));
                }
                let mean: f64 = sorted.iter().map(|(v, p)| v * p).sum();
                if !(mean.is_finite() && mean > 0.0) {
                    return invalid(format!("mean must be finite and > 0, got {mean}"));
                }
                (mean, sorted)
            }
            DistKind::Exponential { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return invalid(format!("exponential rate must be finite and > 0, got {rate}"));
                }
                (1.0 / rate, Vec::new())
            }
            DistKind::UniformInterval { lo, hi } => {
                if !(finite_nonneg(*lo) && hi.is_finite() && lo < hi) {
                    return invalid(format!("uniform interval needs 0 <= lo < hi, got [{lo}, {hi}]"));
                }
                (0.5 * (lo + hi), Vec::new())
            }
            DistKind::ShapeUniform { base, rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return invalid(format!("shape-uniform rate must be finite and > 0, got {rate}"));
                }
                (base.mean() / rate, Vec::new())
            }
            DistKind::Translated { base, shift } => {
                if !finite_nonneg(*shift) {
                    return invalid(format!("translation shift must be finite and >= 0, got {shift}"));
                }
                (base.mean() + shift, Vec::new())
            }
        };
        Ok(Distribution { kind, mean, atoms })
    }
}

impl From<Distribution> for DistKind {
    fn from(d: Distribution) -> Self {
        d.kind
    }
}

impl Distribution {
    pub fn deterministic(value: f64) -> Result<Self> {
        DistKind::Deterministic { value }.try_into()
    }

    pub fn finite(atoms: impl Into<Vec<(f64, f64)>>) -> Result<Self> {
        DistKind::FiniteDiscrete { atoms: atoms.into() }.try_into()
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        DistKind::Exponential { rate }.try_into()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        DistKind::UniformInterval { lo, hi }.try_into()
    }

    pub fn shape_uniform(base: BaseDensity, rate: f64) -> Result<Self> {
        DistKind::ShapeUniform { base, rate }.try_into()
    }

    pub fn translated(base: BaseDensity, shift: f64) -> Result<Self> {
        DistKind::Translated { base, shift }.try_into()
    }

    pub fn kind(&self) -> &DistKind {
        &self.kind
    }

    /// Exact expectation, computed analytically per kind.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn is_atomic(&self) -> bool {
        !self.atoms.is_empty()
    }

    /// Atoms sorted by value, or `None` for continuous kinds.
    pub fn atoms(&self) -> Option<&[(f64, f64)]> {
        self.is_atomic().then_some(self.atoms.as_slice())
    }

    /// The rate if this law is exponential (including shape-uniform over `exp1`).
    pub fn exponential_rate(&self) -> Option<f64> {
        match self.kind {
            DistKind::Exponential { rate } => Some(rate),
            DistKind::ShapeUniform {
                base: BaseDensity::Exp1,
                rate,
            } => Some(rate),
            _ => None,
        }
    }

    /// Closed support `[lo, hi]`; `hi` may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            DistKind::Deterministic { value } => (value, value),
            DistKind::FiniteDiscrete { .. } => (self.atoms[0].0, self.atoms[self.atoms.len() - 1].0),
            DistKind::Exponential { .. } => (0.0, f64::INFINITY),
            DistKind::UniformInterval { lo, hi } => (lo, hi),
            DistKind::ShapeUniform { base, rate } => (0.0, base.support_hi() / rate),
            DistKind::Translated { base, shift } => (shift, base.support_hi() + shift),
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(match self.kind {
            DistKind::Deterministic { .. } | DistKind::FiniteDiscrete { .. } => {
                return Err(Error::NoDensity)
            }
            DistKind::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            DistKind::UniformInterval { lo, hi } => {
                if x < lo || x > hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            DistKind::ShapeUniform { base, rate } => rate * base.pdf(rate * x),
            DistKind::Translated { base, shift } => base.pdf(x - shift),
        })
    }

    /// `P[P <= x]`; right-continuous steps for atomic kinds.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.kind {
            DistKind::Deterministic { .. } | DistKind::FiniteDiscrete { .. } => self
                .atoms
                .iter()
                .take_while(|(v, _)| *v <= x)
                .map(|(_, p)| p)
                .sum::<f64>()
                .min(1.0),
            DistKind::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            DistKind::UniformInterval { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            DistKind::ShapeUniform { base, rate } => base.cdf(rate * x),
            DistKind::Translated { base, shift } => base.cdf(x - shift),
        }
    }

    /// Generalized inverse CDF: the smallest `x` with `cdf(x) >= u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self.kind {
            DistKind::Deterministic { .. } | DistKind::FiniteDiscrete { .. } => {
                let mut acc = 0.0;
                for &(v, p) in &self.atoms {
                    acc += p;
                    if acc >= u {
                        return v;
                    }
                }
                self.atoms[self.atoms.len() - 1].0
            }
            DistKind::Exponential { rate } => {
                if u >= 1.0 {
                    f64::INFINITY
                } else {
                    -(-u).ln_1p() / rate
                }
            }
            DistKind::UniformInterval { lo, hi } => lo + u * (hi - lo),
            DistKind::ShapeUniform { base, rate } => base.quantile(u) / rate,
            DistKind::Translated { base, shift } => base.quantile(u) + shift,
        }
    }

    /// Finite upper limit for integrals against this law: the support end when
    /// bounded, otherwise the `1 - tail_mass` quantile.
    pub fn truncation_point(&self, tail_mass: f64) -> f64 {
        let (_, hi) = self.support();
        if hi.is_finite() {
            hi
        } else {
            self.quantile(1.0 - tail_mass)
        }
    }

    /// Points where the density (or CDF) is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            DistKind::Deterministic { .. } | DistKind::FiniteDiscrete { .. } => {
                self.atoms.iter().map(|a| a.0).collect()
            }
            DistKind::Exponential { .. } => vec![0.0],
            DistKind::UniformInterval { lo, hi } => vec![lo, hi],
            DistKind::ShapeUniform { base, rate } => {
                base.breakpoints().iter().map(|b| b / rate).collect()
            }
            DistKind::Translated { base, shift } => {
                base.breakpoints().iter().map(|b| b + shift).collect()
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            DistKind::Deterministic { value } => value,
            DistKind::FiniteDiscrete { .. } => {
                let u = rng.random::<f64>();
                let mut acc = 0.0;
                for &(v, p) in &self.atoms {
                    acc += p;
                    if u < acc {
                        return v;
                    }
                }
                self.atoms[self.atoms.len() - 1].0
            }
            DistKind::Exponential { rate } => -(-rng.random::<f64>()).ln_1p() / rate,
            DistKind::UniformInterval { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            DistKind::ShapeUniform { base, rate } => base.sample(rng) / rate,
            DistKind::Translated { base, shift } => base.sample(rng) + shift,
        }
    }

    /// Whether `|f(E - x) - f(E + x)| <= tol` across a midpoint grid of
    /// [`SYMMETRY_GRID`] points with `E - x` and `E + x` covering `[-E, 3E]`.
    /// Uniform intervals are symmetric exactly.
    pub fn is_symmetric(&self, tol: f64) -> Result<bool> {
        match self.kind {
            DistKind::Deterministic { .. } | DistKind::FiniteDiscrete { .. } => Err(Error::NoDensity),
            DistKind::UniformInterval { .. } => Ok(true),
            _ => {
                let e = self.mean;
                let step = 2.0 * e / SYMMETRY_GRID as f64;
                for i in 0..SYMMETRY_GRID {
                    let x = (i as f64 + 0.5) * step;
                    if (self.pdf(e - x)? - self.pdf(e + x)?).abs() > tol {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Shifts every atom of an atomic law by `shift`.
    pub fn shifted_atoms(&self, shift: f64) -> Result<Self> {
        if !self.is_atomic() {
            return invalid("only atomic laws can be shifted atom-wise");
        }
        Distribution::finite(self.atoms.iter().map(|&(v, p)| (v + shift, p)).collect::<Vec<_>>())
    }
}

/// The common base density if every law is shape-uniform over the same base.
/// Exponential laws count as shape-uniform over `exp1`.
pub fn common_shape_base(dists: &[&Distribution]) -> Option<BaseDensity> {
    let base_of = |d: &Distribution| match d.kind {
        DistKind::ShapeUniform { base, .. } => Some(base),
        DistKind::Exponential { .. } => Some(BaseDensity::Exp1),
        _ => None,
    };
    common(dists, base_of)
}

/// The common base density if every law is a translate of the same base.
pub fn common_translation_base(dists: &[&Distribution]) -> Option<BaseDensity> {
    common(dists, |d| match d.kind {
        DistKind::Translated { base, .. } => Some(base),
        _ => None,
    })
}

fn common(
    dists: &[&Distribution],
    base_of: impl Fn(&Distribution) -> Option<BaseDensity>,
) -> Option<BaseDensity> {
    let first = base_of(dists.first()?)?;
    dists
        .iter()
        .all(|d| base_of(d) == Some(first))
        .then_some(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_with_breaks, rng_stream, QuadratureConfig};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pdf_examples() {
        assert_eq!(Distribution::exponential(1.0).unwrap().pdf(0.0).unwrap(), 1.0);
        assert_eq!(Distribution::uniform(0.0, 2.0).unwrap().pdf(1.0).unwrap(), 0.5);
        let d = Distribution::shape_uniform(BaseDensity::Exp1, 2.0).unwrap();
        assert_eq!(d.pdf(0.0).unwrap(), 2.0);
    }

    #[test]
    fn pdf_of_atomic_laws_errors() {
        let d = Distribution::finite(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert!(matches!(d.pdf(1.0), Err(Error::NoDensity)));
        let d = Distribution::deterministic(1.0).unwrap();
        assert!(matches!(d.pdf(1.0), Err(Error::NoDensity)));
        assert!(matches!(d.is_symmetric(1e-9), Err(Error::NoDensity)));
    }

    #[test]
    fn cdf_examples() {
        let d = Distribution::exponential(2.0).unwrap();
        assert!(close(d.cdf(2f64.ln() / 2.0), 0.5, 1e-15));
        let d = Distribution::finite(vec![(0.0, 0.9), (100.0, 0.1)]).unwrap();
        assert_eq!(d.cdf(0.0), 0.9);
        assert_eq!(d.cdf(-1e-300), 0.0);
        assert_eq!(d.cdf(100.0), 1.0);
        let d = Distribution::translated(BaseDensity::Uniform02, 3.0).unwrap();
        assert_eq!(d.cdf(4.0), 0.5);
    }

    #[test]
    fn mean_examples() {
        assert_eq!(Distribution::exponential(4.0).unwrap().mean(), 0.25);
        let m = 100.0;
        let d = Distribution::finite(vec![(0.0, 1.0 - 1.0 / m), (m * m, 1.0 / m)]).unwrap();
        assert!(close(d.mean(), 100.0, 1e-12));
        let d = Distribution::translated(BaseDensity::Exp1, 1.0).unwrap();
        assert_eq!(d.mean(), 2.0);
        let d = Distribution::shape_uniform(BaseDensity::Tri02, 4.0).unwrap();
        assert_eq!(d.mean(), 0.25);
    }

    #[test]
    fn deterministic_sample_is_constant() {
        let d = Distribution::deterministic(5.0).unwrap();
        let mut rng = rng_stream(9, 0);
        assert!((0..10).all(|_| d.sample(&mut rng) == 5.0));
    }

    #[test]
    fn exponential_sample_mean() {
        let d = Distribution::exponential(1.0).unwrap();
        let mut rng = rng_stream(42, 0);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let se = sd / (n as f64).sqrt();
        assert!((mean - 1.0).abs() <= 4.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn finite_sample_frequencies() {
        let d = Distribution::finite(vec![(0.0, 0.99), (1e4, 0.01)]).unwrap();
        let mut rng = rng_stream(42, 1);
        let n = 1_000_000;
        let hits = (0..n).filter(|_| d.sample(&mut rng) == 1e4).count();
        let freq = hits as f64 / n as f64;
        let se = (0.01f64 * 0.99 / n as f64).sqrt();
        assert!((freq - 0.01).abs() <= 4.0 * se, "freq {freq}");
    }

    #[test]
    fn symmetry_examples() {
        assert!(Distribution::uniform(1.0, 3.0).unwrap().is_symmetric(1e-12).unwrap());
        assert!(!Distribution::exponential(1.0).unwrap().is_symmetric(1e-6).unwrap());
        for base in [BaseDensity::Uniform02, BaseDensity::Tri02] {
            let d = Distribution::translated(base, 2.7).unwrap();
            assert!(d.is_symmetric(1e-12).unwrap(), "{base}");
            let d = Distribution::shape_uniform(base, 0.3).unwrap();
            assert!(d.is_symmetric(1e-12).unwrap(), "{base}");
        }
        for base in [BaseDensity::Exp1, BaseDensity::Erlang2, BaseDensity::Ramp03] {
            let d = Distribution::translated(base, 1.0).unwrap();
            assert!(!d.is_symmetric(1e-6).unwrap(), "{base}");
        }
    }

    #[test]
    fn symmetric_laws_vanish_beyond_twice_the_mean() {
        for d in [
            Distribution::uniform(0.5, 1.5).unwrap(),
            Distribution::translated(BaseDensity::Tri02, 0.4).unwrap(),
            Distribution::shape_uniform(BaseDensity::Uniform02, 3.0).unwrap(),
        ] {
            let e = d.mean();
            for i in 1..100 {
                let x = 2.0 * e * (1.0 + i as f64 * 0.01);
                assert_eq!(d.pdf(x).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn densities_integrate_to_one_with_the_right_mean() {
        let cfg = QuadratureConfig::default();
        let laws = [
            Distribution::exponential(0.7).unwrap(),
            Distribution::uniform(0.2, 3.1).unwrap(),
            Distribution::shape_uniform(BaseDensity::Erlang2, 2.5).unwrap(),
            Distribution::shape_uniform(BaseDensity::Tri02, 0.5).unwrap(),
            Distribution::shape_uniform(BaseDensity::Ramp03, 1.3).unwrap(),
            Distribution::translated(BaseDensity::Exp1, 0.8).unwrap(),
            Distribution::translated(BaseDensity::Uniform02, 2.0).unwrap(),
        ];
        for d in &laws {
            let (lo, _) = d.support();
            // Deeper truncation than the default so that the mean integral also meets 1e-8.
            let hi = d.truncation_point(1e-16);
            let brk = d.breakpoints();
            let mass = integrate_with_breaks(|x| d.pdf(x).unwrap(), lo, hi, &brk, &cfg).unwrap();
            let mean = integrate_with_breaks(|x| x * d.pdf(x).unwrap(), lo, hi, &brk, &cfg).unwrap();
            assert!(close(mass, 1.0, 1e-8), "{d:?}: mass {mass}");
            assert!(close(mean, d.mean(), 1e-8), "{d:?}: mean {mean}");
        }
    }

    #[test]
    fn base_densities_have_unit_mean_and_consistent_quantiles() {
        let cfg = QuadratureConfig::default();
        for base in BaseDensity::ALL {
            let hi = if base.support_hi().is_finite() {
                base.support_hi()
            } else {
                base.quantile(1.0 - 1e-16)
            };
            let m = integrate_with_breaks(|x| x * base.pdf(x), 0.0, hi, base.breakpoints(), &cfg)
                .unwrap();
            assert!(close(m, base.mean(), 1e-9), "{base}: {m}");
            assert_eq!(base.cdf(-1.0), 0.0);
            let mut prev = 0.0;
            for i in 1..400 {
                let x = i as f64 * 0.01;
                let c = base.cdf(x);
                assert!(c >= prev, "{base} cdf not monotone at {x}");
                prev = c;
                if x < base.support_hi() {
                    assert!(close(base.quantile(c), x, 1e-9), "{base} quantile at {x}");
                }
            }
        }
    }

    #[test]
    fn shape_uniform_exp1_equals_exponential() {
        for rate in [0.01, 0.5, 1.0, 3.0, 80.0] {
            let a = Distribution::shape_uniform(BaseDensity::Exp1, rate).unwrap();
            let b = Distribution::exponential(rate).unwrap();
            for i in 0..500 {
                let x = i as f64 * 0.02 / rate;
                let (fa, fb) = (a.pdf(x).unwrap(), b.pdf(x).unwrap());
                assert!((fa - fb).abs() <= 1e-12 * fb.max(1.0), "rate {rate} x {x}");
            }
            assert_eq!(a.exponential_rate(), Some(rate));
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let d = Distribution::translated(BaseDensity::Erlang2, 0.5).unwrap();
        let mut a = rng_stream(3, 11);
        let mut b = rng_stream(3, 11);
        let xa: Vec<f64> = (0..100).map(|_| d.sample(&mut a)).collect();
        let xb: Vec<f64> = (0..100).map(|_| d.sample(&mut b)).collect();
        assert_eq!(xa, xb);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(Distribution::exponential(0.0).is_err());
        assert!(Distribution::exponential(f64::NAN).is_err());
        assert!(Distribution::uniform(2.0, 1.0).is_err());
        assert!(Distribution::uniform(-1.0, 1.0).is_err());
        assert!(Distribution::deterministic(0.0).is_err());
        assert!(Distribution::translated(BaseDensity::Exp1, -0.1).is_err());
        assert!(Distribution::finite(vec![(1.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(Distribution::finite(vec![(1.0, 0.5), (2.0, 0.4)]).is_err());
        assert!(Distribution::finite(vec![(-1.0, 1.0)]).is_err());
        assert!(Distribution::finite(vec![(0.0, 1.0)]).is_err());
        assert!(Distribution::finite(Vec::new()).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let src = r#"[
            {"type":"exponential","rate":2.0},
            {"type":"finite","atoms":[[0,0.99],[10000,0.01]]},
            {"type":"uniform","lo":0,"hi":2},
            {"type":"shape_uniform","base":"exp1","rate":3.0},
            {"type":"translated","base":"uniform01x2","shift":1.5},
            {"type":"deterministic","value":0.25}
        ]"#;
        let ds: Vec<Distribution> = serde_json::from_str(src).unwrap();
        assert_eq!(ds.len(), 6);
        assert_eq!(ds[1].mean(), 100.0);
        assert_eq!(ds[4].mean(), 2.5);
        let back: Vec<Distribution> =
            serde_json::from_str(&serde_json::to_string(&ds).unwrap()).unwrap();
        assert_eq!(ds, back);
        let bad = r#"{"type":"uniform","lo":3,"hi":2}"#;
        assert!(serde_json::from_str::<Distribution>(bad).is_err());
        let bad = r#"{"type":"translated","base":"nope","shift":1}"#;
        assert!(serde_json::from_str::<Distribution>(bad).is_err());
    }

    #[test]
    fn base_names_parse() {
        for b in BaseDensity::ALL {
            assert_eq!(b.name().parse::<BaseDensity>().unwrap(), b);
        }
        assert!("gamma".parse::<BaseDensity>().is_err());
    }

    #[test]
    fn class_detection() {
        let e = Distribution::exponential(2.0).unwrap();
        let s = Distribution::shape_uniform(BaseDensity::Exp1, 0.5).unwrap();
        let t = Distribution::shape_uniform(BaseDensity::Tri02, 0.5).unwrap();
        assert_eq!(common_shape_base(&[&e, &s]), Some(BaseDensity::Exp1));
        assert_eq!(common_shape_base(&[&e, &t]), None);
        let a = Distribution::translated(BaseDensity::Ramp03, 0.0).unwrap();
        let b = Distribution::translated(BaseDensity::Ramp03, 2.0).unwrap();
        assert_eq!(common_translation_base(&[&a, &b]), Some(BaseDensity::Ramp03));
        assert_eq!(common_translation_base(&[&a, &e]), None);
    }
}
