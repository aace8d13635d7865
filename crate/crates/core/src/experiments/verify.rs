//! Randomized checks of the per-class guarantees.
//!
//! Instance `i` of a run is drawn from random stream `(seed, i)`:
//! - `n` uniform in `{2, ..., 8}`;
//! - weights log-uniform on `[0.1, 10]`, or all `1` for the translated class
//!   unless non-unit weights are requested;
//! - every scale, rate or shift log-uniform on `[0.1, 10]`.
//!
//! Per class:
//! - `symmetric`: uniform intervals `[c(1-h), c(1+h)]` with `h` uniform in
//!   `(0, 1)`, and scaled triangular or uniform base shapes;
//! - `shape-uniform`: one base density per instance, a rate per job;
//! - `translated`: one base density per instance, a shift per job;
//! - `exponential`: a rate per job, checked against `1 / (1 + alpha)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::report::Report;
use crate::distributions::{BaseDensity, Distribution};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::numerics::{rng_stream, QuadratureConfig};
use crate::pairwise::{analyze, HALF_BOUND_SLACK, KAPPA_BOUND_SLACK};
use crate::policies::Policy;

/// Slack on the `1 / (1 + alpha)` bound.
pub const ALPHA_BOUND_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceClass {
    Symmetric,
    ShapeUniform,
    Translated,
    Exponential,
}

impl InstanceClass {
    pub const ALL: [InstanceClass; 4] = [
        InstanceClass::Symmetric,
        InstanceClass::ShapeUniform,
        InstanceClass::Translated,
        InstanceClass::Exponential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceClass::Symmetric => "symmetric",
            InstanceClass::ShapeUniform => "shape-uniform",
            InstanceClass::Translated => "translated",
            InstanceClass::Exponential => "exponential",
        }
    }
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InstanceClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown class {s:?} (expected symmetric, shape-uniform, translated or exponential)"
                ))
            })
    }
}

pub(crate) fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn random_symmetric<R: Rng + ?Sized>(rng: &mut R) -> Result<Distribution> {
    let scale = log_uniform(rng, 0.1, 10.0);
    match rng.random_range(0..3) {
        0 => {
            let h = rng.random_range(0.0..1.0);
            Distribution::uniform(scale * (1.0 - h), scale * (1.0 + h))
        }
        1 => Distribution::shape_uniform(BaseDensity::Tri02, scale),
        _ => Distribution::shape_uniform(BaseDensity::Uniform02, scale),
    }
}

/// A random instance of `class`; see the module docs for the ranges.
pub fn random_instance<R: Rng + ?Sized>(class: InstanceClass, unit_weights: bool, rng: &mut R) -> Result<Instance> {
    let n = rng.random_range(2..=8usize);
    let base = BaseDensity::ALL[rng.random_range(0..BaseDensity::ALL.len())];
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let weight = if unit_weights { 1.0 } else { log_uniform(rng, 0.1, 10.0) };
        let dist = match class {
            InstanceClass::Symmetric => random_symmetric(rng)?,
            InstanceClass::ShapeUniform => Distribution::shape_uniform(base, log_uniform(rng, 0.1, 10.0))?,
            InstanceClass::Translated => Distribution::translated(base, log_uniform(rng, 0.1, 10.0))?,
            InstanceClass::Exponential => Distribution::exponential(log_uniform(rng, 0.1, 10.0))?,
        };
        pairs.push((weight, dist));
    }
    Instance::from_pairs(pairs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyRow {
    pub class: InstanceClass,
    pub index: u64,
    pub n: usize,
    pub rog: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub bound: f64,
    /// `bound - rog`; negative means the bound is violated.
    pub margin: f64,
    /// `None` when the class guarantee is not claimed for this instance.
    pub pass: Option<bool>,
    pub kappa_bound_ok: bool,
    pub method: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub class: InstanceClass,
    pub count: u64,
    pub seed: u64,
    pub unit_weights: bool,
    pub claimed: bool,
    pub passes: u64,
    pub failures: u64,
    /// Instances with `H = L`, where the gap is undefined.
    pub skipped: u64,
    pub worst_margin: f64,
    pub note: String,
    pub rows: Vec<VerifyRow>,
}

impl Report for VerifyReport {
    type Row = VerifyRow;

    fn rows(&self) -> &[VerifyRow] {
        &self.rows
    }

    fn passed(&self) -> bool {
        self.failures == 0 && self.rows.iter().all(|r| r.kappa_bound_ok)
    }
}

fn check_instance(class: InstanceClass, claimed: bool, index: u64, inst: &Instance) -> Result<Option<VerifyRow>> {
    let report = match analyze(inst, Policy::Sam, &QuadratureConfig::default()) {
        Ok(r) => r,
        Err(Error::DegenerateInstance) => return Ok(None),
        Err(e) => return Err(e),
    };
    let (bound, pass) = if class == InstanceClass::Exponential {
        let bound = 1.0 / (1.0 + report.alpha);
        (bound, report.rog <= bound + ALPHA_BOUND_SLACK)
    } else {
        let pairs_ok = report.kappa >= 0.5 - HALF_BOUND_SLACK;
        (0.5, pairs_ok && report.rog <= 0.5 + HALF_BOUND_SLACK)
    };
    Ok(Some(VerifyRow {
        class,
        index,
        n: report.n,
        rog: report.rog,
        kappa: report.kappa,
        alpha: report.alpha,
        bound,
        margin: bound - report.rog,
        pass: claimed.then_some(pass),
        kappa_bound_ok: report.rog <= 1.0 - report.kappa + KAPPA_BOUND_SLACK,
        method: report.method,
    }))
}

/// Draws `count` instances of `class` and checks the class guarantee on each.
///
/// `non_unit_weights` only changes the translated class, whose guarantee is
/// stated for unit weights; with it the rows are computed but not judged.
pub fn run_verify(class: InstanceClass, count: u64, seed: u64, non_unit_weights: bool) -> Result<VerifyReport> {
    let unit_weights = class == InstanceClass::Translated && !non_unit_weights;
    let claimed = !(class == InstanceClass::Translated && non_unit_weights);
    let results: Vec<Option<VerifyRow>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let inst = random_instance(class, unit_weights, &mut rng_stream(seed, i))?;
            check_instance(class, claimed, i, &inst)
        })
        .collect::<Result<_>>()?;

    let skipped = results.iter().filter(|r| r.is_none()).count() as u64;
    let rows: Vec<VerifyRow> = results.into_iter().flatten().collect();
    let passes = rows.iter().filter(|r| r.pass == Some(true)).count() as u64;
    let failures = rows.iter().filter(|r| r.pass == Some(false)).count() as u64;
    let worst_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let note = if claimed {
        String::new()
    } else {
        "guarantee not claimed: the translated class requires uniform weights w_j = 1".to_string()
    };
    Ok(VerifyReport {
        class,
        count,
        seed,
        unit_weights,
        claimed,
        passes,
        failures,
        skipped,
        worst_margin,
        note,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{common_shape_base, common_translation_base};

    #[test]
    fn generators_respect_their_class() {
        for i in 0..50 {
            let mut rng = rng_stream(3, i);
            let inst = random_instance(InstanceClass::ShapeUniform, false, &mut rng).unwrap();
            assert!(common_shape_base(&inst.distributions()).is_some());
            assert!((2..=8).contains(&inst.n()));

            let inst = random_instance(InstanceClass::Translated, true, &mut rng).unwrap();
            assert!(common_translation_base(&inst.distributions()).is_some());
            assert!(inst.weights().iter().all(|&w| w == 1.0));

            let inst = random_instance(InstanceClass::Symmetric, false, &mut rng).unwrap();
            for d in inst.distributions() {
                assert!(d.is_symmetric(1e-9).unwrap());
            }
            for w in inst.weights() {
                assert!((0.1..=10.0).contains(&w));
            }
        }
    }

    #[test]
    fn small_runs_pass() {
        for class in InstanceClass::ALL {
            let r = run_verify(class, 12, 7, false).unwrap();
            assert_eq!(r.passes + r.skipped, 12, "{class}");
            assert!(r.passed(), "{class}: worst margin {}", r.worst_margin);
        }
    }

    #[test]
    fn weighted_translated_is_not_claimed() {
        let r = run_verify(InstanceClass::Translated, 8, 1, true).unwrap();
        assert!(!r.claimed && !r.unit_weights);
        assert!(r.rows.iter().all(|row| row.pass.is_none()));
        assert!(r.note.contains("uniform weights"));
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = run_verify(InstanceClass::Exponential, 10, 99, false).unwrap();
        let b = run_verify(InstanceClass::Exponential, 10, 99, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn class_names_round_trip() {
        for c in InstanceClass::ALL {
            assert_eq!(c.name().parse::<InstanceClass>().unwrap(), c);
        }
        assert!("gaussian".parse::<InstanceClass>().is_err());
    }
}
