//! Tightness and validity of `rog <= 1 / (1 + alpha)` for exponential jobs.
//!
//! Random `alpha`-separated instances place jobs on priority levels
//! `pi_{i+1} = pi_i * alpha * s` with `s` log-uniform on `[1, 2]`. Jobs on
//! one level get weight `2^m` and rate `pi * 2^-m`, so their priorities are
//! exactly equal in floating point.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::report::Report;
use super::verify::{log_uniform, ALPHA_BOUND_SLACK};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::numerics::{rng_stream, QuadratureConfig};
use crate::pairwise::{alpha_separation, analyze, KAPPA_BOUND_SLACK};
use crate::policies::Policy;

/// Priority ratio used for the two-job instance at `alpha = 1`, where an exact
/// ratio of one would make `H = L`.
pub const UNIT_ALPHA_RATIO: f64 = 1.0 + 1e-9;

/// Two exponential unit-weight jobs with priority ratio `alpha`.
pub fn two_job_instance(alpha: f64) -> Result<Instance> {
    check_alpha(alpha)?;
    let ratio = if alpha == 1.0 { UNIT_ALPHA_RATIO } else { alpha };
    Instance::from_pairs([
        (1.0, Distribution::exponential(ratio)?),
        (1.0, Distribution::exponential(1.0)?),
    ])
}

/// A random exponential instance whose distinct priorities are at least `alpha` apart.
pub fn separated_instance<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<Instance> {
    check_alpha(alpha)?;
    let n = rng.random_range(2..=8usize);
    let n_levels = rng.random_range(2..=n);
    let mut levels = Vec::with_capacity(n_levels);
    let mut pi = log_uniform(rng, 0.1, 10.0);
    for _ in 0..n_levels {
        levels.push(pi);
        pi *= alpha * log_uniform(rng, 1.0, 2.0);
    }
    let pairs = (0..n)
        .map(|j| {
            // The first `n_levels` jobs cover every level once.
            let level = if j < n_levels { j } else { rng.random_range(0..n_levels) };
            let scale = 2f64.powi(rng.random_range(-3..=3));
            Ok((scale, Distribution::exponential(levels[level] / scale)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::from_pairs(pairs)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::Config(format!("alpha must be finite and >= 1, got {alpha}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub rog: f64,
    pub bound: f64,
    /// `two-job` (the bound is attained) or `separated`.
    pub kind: &'static str,
    pub index: u64,
    pub n: usize,
    pub alpha_measured: f64,
    pub kappa: f64,
    pub pass: bool,
    pub method: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub alphas: Vec<f64>,
    pub count: u64,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

impl Report for SweepReport {
    type Row = SweepRow;

    fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn row(alpha: f64, kind: &'static str, index: u64, inst: &Instance) -> Result<SweepRow> {
    let r = analyze(inst, Policy::Sam, &QuadratureConfig::default())?;
    let bound = 1.0 / (1.0 + alpha);
    let separated = alpha_separation(inst) >= alpha * (1.0 - 1e-12);
    let pass = r.rog <= bound + ALPHA_BOUND_SLACK
        && r.rog <= 1.0 - r.kappa + KAPPA_BOUND_SLACK
        && (kind != "two-job" || (r.rog - bound).abs() <= ALPHA_BOUND_SLACK)
        && (kind != "separated" || separated);
    Ok(SweepRow {
        alpha,
        rog: r.rog,
        bound,
        kind,
        index,
        n: r.n,
        alpha_measured: r.alpha,
        kappa: r.kappa,
        pass,
        method: r.method,
    })
}

/// For each `alpha`: the two-job instance, then `count` random separated
/// instances drawn from stream `(seed, a * count + i)` for the `a`-th alpha.
pub fn run_sweep_alpha(alphas: &[f64], count: u64, seed: u64) -> Result<SweepReport> {
    if alphas.is_empty() {
        return Err(Error::Config("at least one alpha is required".into()));
    }
    for &a in alphas {
        check_alpha(a)?;
    }
    let jobs: Vec<(usize, Option<u64>)> = (0..alphas.len())
        .flat_map(|a| std::iter::once((a, None)).chain((0..count).map(move |i| (a, Some(i)))))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(a, i)| {
            let alpha = alphas[a];
            match i {
                None => row(alpha, "two-job", 0, &two_job_instance(alpha)?),
                Some(i) => {
                    let mut rng = rng_stream(seed, a as u64 * count + i);
                    row(alpha, "separated", i, &separated_instance(alpha, &mut rng)?)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        alphas: alphas.to_vec(),
        count,
        seed,
        rows,
    })
}
