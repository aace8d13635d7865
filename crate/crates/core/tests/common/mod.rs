#![allow(dead_code)]

use rand::Rng;
use sample_sched_core::{BaseDensity, Distribution, Instance};

pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

pub fn random_base<R: Rng>(rng: &mut R) -> BaseDensity {
    BaseDensity::ALL[rng.random_range(0..BaseDensity::ALL.len())]
}

/// Up to `max_atoms` atoms; values sometimes drawn from a small integer grid
/// (including zero) so that sample ties actually occur.
pub fn random_finite<R: Rng>(rng: &mut R, max_atoms: usize) -> Distribution {
    let k = rng.random_range(1..=max_atoms);
    let grid = rng.random_bool(0.5);
    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(k);
    while atoms.len() < k {
        let v = if grid {
            rng.random_range(0..5) as f64
        } else {
            log_uniform(rng, 0.1, 10.0)
        };
        if atoms.iter().all(|a| a.0 != v) {
            atoms.push((v, rng.random_range(0.05..1.0)));
        }
    }
    if atoms.iter().all(|a| a.0 == 0.0) {
        atoms[0].0 = 1.0;
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    for a in &mut atoms {
        a.1 /= total;
    }
    Distribution::finite(atoms).unwrap()
}

/// Any supported law with parameters in `[0.1, 10]`.
pub fn random_dist<R: Rng>(rng: &mut R) -> Distribution {
    let scale = log_uniform(rng, 0.1, 10.0);
    match rng.random_range(0..6) {
        0 => Distribution::deterministic(scale).unwrap(),
        1 => random_finite(rng, 3),
        2 => Distribution::exponential(scale).unwrap(),
        3 => {
            let lo = rng.random_range(0.0..1.0) * scale;
            Distribution::uniform(lo, lo + scale).unwrap()
        }
        4 => Distribution::shape_uniform(random_base(rng), scale).unwrap(),
        _ => Distribution::translated(random_base(rng), scale).unwrap(),
    }
}

pub fn random_weight<R: Rng>(rng: &mut R) -> f64 {
    log_uniform(rng, 0.1, 10.0)
}

/// Jobs with `n` in `n_range` and laws from `dist`.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    n_range: std::ops::RangeInclusive<usize>,
    mut dist: impl FnMut(&mut R) -> Distribution,
) -> Instance {
    let n = rng.random_range(n_range);
    let pairs: Vec<(f64, Distribution)> = (0..n).map(|_| (random_weight(rng), dist(rng))).collect();
    Instance::from_pairs(pairs).unwrap()
}
