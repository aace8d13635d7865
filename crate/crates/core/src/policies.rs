//! Realization-level scheduling: the schedules each policy produces for one
//! draw of samples or processing times, and their realized cost.
//!
//! SAM and WSPT share one comparator: larger `w / p` first, where `p = 0`
//! counts as an infinite ratio; equal ratios (including two infinities) go to
//! the heavier job, then to the smaller id.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{sequence_cost, Instance, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Order by weight over one sampled processing time per job.
    Sam,
    /// Uniformly random sequence.
    Rnd,
    /// Order by weight over expected processing time (needs the distributions).
    Wsept,
    /// Clairvoyant per-realization optimum; not a static list policy.
    Wspt,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Sam => "sam",
            Policy::Rnd => "rnd",
            Policy::Wsept => "wsept",
            Policy::Wspt => "wspt",
        }
    }

    pub fn is_static(self) -> bool {
        !matches!(self, Policy::Wspt)
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sam" => Ok(Policy::Sam),
            "rnd" => Ok(Policy::Rnd),
            "wsept" => Ok(Policy::Wsept),
            "wspt" => Ok(Policy::Wspt),
            other => Err(Error::Config(format!(
                "unknown policy {other:?} (expected sam, rnd, wsept or wspt)"
            ))),
        }
    }
}

/// One sampled processing time `p'_j` per job.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleVector(Vec<f64>);

/// One realized processing time `p_j` per job.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationVector(Vec<f64>);

macro_rules! time_vector {
    ($name:ident) => {
        impl $name {
            pub fn new(values: Vec<f64>) -> Result<Self> {
                if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return Err(Error::Config(format!(
                        "{} entries must be finite and >= 0, got {bad}",
                        stringify!($name)
                    )));
                }
                Ok(Self(values))
            }

            /// One independent draw per job, in job order.
            pub fn draw<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> Self {
                Self(inst.jobs().iter().map(|j| j.dist.sample(rng)).collect())
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }
        }
    };
}

time_vector!(SampleVector);
time_vector!(RealizationVector);

#[inline]
fn ratio(weight: f64, time: f64) -> f64 {
    if time == 0.0 {
        f64::INFINITY
    } else {
        weight / time
    }
}

/// `Less` when job `a` runs before job `b` under ratio ordering on `times`.
#[inline]
pub fn ratio_cmp(a: (usize, f64, f64), b: (usize, f64, f64)) -> Ordering {
    let (ia, wa, ta) = a;
    let (ib, wb, tb) = b;
    ratio(wb, tb)
        .total_cmp(&ratio(wa, ta))
        .then_with(|| wb.total_cmp(&wa))
        .then_with(|| ia.cmp(&ib))
}

/// Whether SAM puts job `j` ahead of job `k` given their sampled times.
#[inline]
pub fn sam_precedes(j: usize, w_j: f64, p_j: f64, k: usize, w_k: f64, p_k: f64) -> bool {
    ratio_cmp((j, w_j, p_j), (k, w_k, p_k)) == Ordering::Less
}

/// Ratio order of `times` written into `order` (reused buffer).
pub(crate) fn ratio_order_into(weights: &[f64], times: &[f64], order: &mut Vec<usize>) {
    order.clear();
    order.extend(0..weights.len());
    order.sort_unstable_by(|&a, &b| ratio_cmp((a, weights[a], times[a]), (b, weights[b], times[b])));
}

fn check_lengths(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::Config(format!(
            "{} weights for {n} processing times",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::Config(format!("weights must be finite and > 0, got {w}")));
    }
    Ok(())
}

/// SAM: non-increasing `w_j / p'_j`.
pub fn sam_schedule(weights: &[f64], samples: &SampleVector) -> Result<Permutation> {
    check_lengths(weights, samples.len())?;
    let mut order = Vec::new();
    ratio_order_into(weights, samples.as_slice(), &mut order);
    Ok(Permutation::from_vec_unchecked(order))
}

/// RND: a uniformly random sequence (Fisher-Yates).
pub fn rnd_schedule<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    Permutation::from_vec_unchecked(order)
}

/// WSPT on realized times: the optimal sequence for that realization.
pub fn wspt_schedule(weights: &[f64], realization: &RealizationVector) -> Result<Permutation> {
    check_lengths(weights, realization.len())?;
    let mut order = Vec::new();
    ratio_order_into(weights, realization.as_slice(), &mut order);
    Ok(Permutation::from_vec_unchecked(order))
}

/// `sum_j w_j C_j` of running `perm` with realized times.
pub fn realized_cost(weights: &[f64], realization: &RealizationVector, perm: &Permutation) -> Result<f64> {
    check_lengths(weights, realization.len())?;
    if perm.len() != weights.len() {
        return Err(Error::InvalidPermutation(format!(
            "permutation of {} jobs for {} weights",
            perm.len(),
            weights.len()
        )));
    }
    Ok(sequence_cost(weights, realization.as_slice(), perm.as_slice()))
}
